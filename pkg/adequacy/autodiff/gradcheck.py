# ***** BEGIN LICENSE BLOCK *****
# Version: MPL 1.1/GPL 2.0/LGPL 2.1
#
# The contents of this file are subject to the Mozilla Public License Version
# 1.1 (the "License"); you may not use this file except in compliance with
# the License. You may obtain a copy of the License at
# http://www.mozilla.org/MPL/
#
# Software distributed under the License is distributed on an "AS IS" basis,
# WITHOUT WARRANTY OF ANY KIND, either express or implied. See the License
# for the specific language governing rights and limitations under the
# License.
#
# The Original Code is AdequacyNMT
#
# The Initial Developer of the Original Code is the AdequacyNMT authors.
# Portions created by the Initial Developer are Copyright (C) 2026
# the Initial Developer. All Rights Reserved.
#
# Alternatively, the contents of this file may be used under the terms of
# either the GNU General Public License Version 2 or later (the "GPL"), or
# the GNU Lesser General Public License Version 2.1 or later (the "LGPL"),
# in which case the provisions of the GPL or the LGPL are applicable instead
# of those above. If you wish to allow use of your version of this file only
# under the terms of either the GPL or the LGPL, and not to allow others to
# use your version of this file under the terms of the MPL, indicate your
# decision by deleting the provisions above and replace them with the notice
# and other provisions required by the GPL or the LGPL. If you do not delete
# the provisions above, a recipient may use your version of this file under
# the terms of any one of the MPL, the GPL or the LGPL.
#
# ***** END LICENSE BLOCK *****
""" Central finite-difference oracle for the analytic gradients.
"""
import numpy as np

from adequacy.autodiff.tensor import Tape, no_grad


def numeric_gradient(loss_fn, tensor, eps=1e-5):
    """Central differences of ``loss_fn()`` with respect to ``tensor``."""
    grad = np.zeros(tensor.shape)
    flat = tensor.values.reshape(-1)
    out = grad.reshape(-1)
    with no_grad():
        for index in range(flat.size):
            saved = flat[index]
            flat[index] = saved + eps
            upper = loss_fn().item()
            flat[index] = saved - eps
            lower = loss_fn().item()
            flat[index] = saved
            out[index] = (upper - lower) / (2.0 * eps)
    return grad


def analytic_gradients(loss_fn, tensors):
    for tensor in tensors:
        tensor.zero_grad()
    with Tape() as tape:
        loss = loss_fn()
    tape.backward(loss)
    return [np.zeros(t.shape) if t.grad is None else t.grad
            for t in tensors]


def check_gradients(loss_fn, tensors, eps=1e-5, rtol=1e-4, atol=1e-6):
    """Compares analytic and numeric gradients.

    Returns a list of ``(tensor, worst_error)`` pairs for the tensors whose
    gradients disagree by more than ``max(atol, rtol * magnitude)``; an
    empty list means every gradient checks out.
    """
    failures = []
    analytic = analytic_gradients(loss_fn, tensors)
    for tensor, grad in zip(tensors, analytic):
        numeric = numeric_gradient(loss_fn, tensor, eps)
        error = np.abs(grad - numeric)
        allowed = np.maximum(atol, rtol * np.maximum(np.abs(grad),
                                                     np.abs(numeric)))
        if np.any(error > allowed):
            failures.append((tensor, float(np.max(error - allowed))))
    return failures
