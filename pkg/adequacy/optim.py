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
"""
Parameter updates.

``SGD`` is the plain ``theta = theta - eta * grad`` rule. ``Adam`` is kept
for toy runs that need to converge in few updates; it is never the default.
Both clip the global gradient norm before updating.
"""
import numpy as np

from adequacy import logger
from adequacy.errors import ConfigError


def clip_scale(norm, max_norm):
    if max_norm is None or norm <= max_norm or norm == 0.0:
        return 1.0
    return max_norm / norm


class SGD(object):

    def __init__(self, params, learning_rate, clip_norm=5.0):
        if learning_rate <= 0:
            raise ConfigError('learning rate must be positive')
        self.params = params
        self.learning_rate = learning_rate
        self.clip_norm = clip_norm

    def step(self):
        """Applies the accumulated gradients, clears them and returns the
        global norm measured before clipping."""
        norm = self.params.grad_norm()
        scale = clip_scale(norm, self.clip_norm)
        if scale != 1.0:
            logger.debug('clipping gradient norm %.4f to %.4f', norm,
                         self.clip_norm)
        for name, tensor in self.params.items():
            if tensor.grad is None:
                continue
            self._update(name, tensor, tensor.grad * scale)
        self.params.zero_grad()
        return norm

    def _update(self, name, tensor, grad):
        tensor.values -= self.learning_rate * grad


class Adam(SGD):

    def __init__(self, params, learning_rate, clip_norm=5.0, beta1=0.9,
                 beta2=0.999, eps=1e-8):
        SGD.__init__(self, params, learning_rate, clip_norm)
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self._moments = {}
        self._steps = {}

    def _update(self, name, tensor, grad):
        first, second = self._moments.get(name, (np.zeros(tensor.shape),
                                                 np.zeros(tensor.shape)))
        step = self._steps.get(name, 0) + 1
        first = self.beta1 * first + (1.0 - self.beta1) * grad
        second = self.beta2 * second + (1.0 - self.beta2) * grad * grad
        self._moments[name] = first, second
        self._steps[name] = step
        first_hat = first / (1.0 - self.beta1 ** step)
        second_hat = second / (1.0 - self.beta2 ** step)
        tensor.values -= (self.learning_rate * first_hat /
                          (np.sqrt(second_hat) + self.eps))


_OPTIMIZERS = {'sgd': SGD, 'adam': Adam}


def make_optimizer(name, params, learning_rate, clip_norm=5.0):
    try:
        klass = _OPTIMIZERS[name]
    except KeyError:
        raise ConfigError('unknown optimizer %r' % name)
    return klass(params, learning_rate, clip_norm)
