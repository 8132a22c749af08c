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
Tensors and the tape they are recorded on.

A Tape is a Wengert list: each executed op appends a record holding its
inputs, its output and a closure mapping the output gradient to the input
gradients. Since an op can only run once its inputs exist, the list is
always in topological order and the backward pass simply walks it in
reverse.

The tape receiving records is the innermost one entered with ``with``, per
thread, so independent tapes can run concurrently::

    with Tape() as tape:
        loss = ops.sum(ops.mul(w, x))
    grads = tape.backward(loss)
"""
import threading
from contextlib import contextmanager

import numpy as np

from adequacy.errors import ContractViolation, NumericDomainError


_local = threading.local()


def _stack():
    stack = getattr(_local, 'stack', None)
    if stack is None:
        stack = _local.stack = []
    return stack


def active_tape():
    """Returns the tape ops currently record on, or None."""
    stack = _stack()
    if not stack:
        return None
    return stack[-1]


@contextmanager
def no_grad():
    """Runs a block without recording anything."""
    stack = _stack()
    stack.append(None)
    try:
        yield
    finally:
        stack.pop()


class Tensor(object):
    """Dense float64 array with an optional gradient.
    """
    def __init__(self, values, requires_grad=False, name=None):
        values = np.array(values, dtype=np.float64)
        if values.ndim == 0:
            values = values.reshape(1)
        if any(extent <= 0 for extent in values.shape):
            raise ContractViolation('tensor extents must be positive, got %s'
                                    % (values.shape,))
        if not np.all(np.isfinite(values)):
            raise NumericDomainError('non-finite values in tensor %s'
                                     % (name or ''))
        self.values = values
        self.requires_grad = requires_grad
        self.grad = None
        self.name = name
        # set on op outputs only
        self.op = None
        self.tape = None

    @property
    def shape(self):
        return self.values.shape

    @property
    def size(self):
        return self.values.size

    @property
    def is_leaf(self):
        return self.op is None

    def item(self):
        if self.size != 1:
            raise ContractViolation('item() on a tensor of shape %s'
                                    % (self.shape,))
        return float(self.values.reshape(-1)[0])

    def zero_grad(self):
        self.grad = None

    def accumulate(self, grad):
        if grad.shape != self.values.shape:
            raise ContractViolation('gradient shape %s does not match %s'
                                    % (grad.shape, self.values.shape))
        if self.grad is None:
            self.grad = np.array(grad, dtype=np.float64)
        else:
            self.grad = self.grad + grad

    def __repr__(self):
        label = self.name or self.op or 'tensor'
        return '<Tensor %s %s>' % (label, self.shape)


class _Record(object):
    __slots__ = ('kind', 'inputs', 'output', 'backward')

    def __init__(self, kind, inputs, output, backward):
        self.kind = kind
        self.inputs = inputs
        self.output = output
        self.backward = backward


class Tape(object):
    """Ordered record of the ops executed while it is active."""

    def __init__(self):
        self._records = []
        self._consumed = False

    def __enter__(self):
        _stack().append(self)
        return self

    def __exit__(self, exc_type, exc_value, tb):
        stack = _stack()
        if stack and stack[-1] is self:
            stack.pop()
        return False

    def __len__(self):
        return len(self._records)

    @property
    def consumed(self):
        return self._consumed

    def kinds(self):
        return [record.kind for record in self._records]

    def record(self, kind, inputs, output, backward):
        if self._consumed:
            raise ContractViolation('tape already consumed by a backward '
                                    'pass, call reset() first')
        output.op = kind
        output.tape = self
        self._records.append(_Record(kind, inputs, output, backward))

    def reset(self):
        self._records = []
        self._consumed = False

    def backward(self, loss):
        """Back-propagates a scalar loss.

        Populates ``grad`` on every requires_grad leaf (accumulating onto
        what is already there) and returns a map of every requires_grad
        tensor reached to its gradient.
        """
        if self._consumed:
            raise ContractViolation('tape already consumed by a backward '
                                    'pass, call reset() first')
        if loss.size != 1:
            raise ContractViolation('backward needs a scalar loss, got '
                                    'shape %s' % (loss.shape,))
        if not self._records:
            raise ContractViolation('backward on an empty tape')

        grads = {id(loss): np.ones(loss.shape)}
        tensors = {id(loss): loss}

        for record in reversed(self._records):
            grad = grads.get(id(record.output))
            if grad is None:
                continue
            for tensor, input_grad in zip(record.inputs,
                                          record.backward(grad)):
                if input_grad is None or not tensor.requires_grad:
                    continue
                key = id(tensor)
                if key in grads:
                    grads[key] = grads[key] + input_grad
                else:
                    grads[key] = input_grad
                    tensors[key] = tensor

        self._consumed = True

        result = {}
        for key, tensor in tensors.items():
            if not tensor.requires_grad:
                continue
            if tensor.is_leaf:
                tensor.accumulate(grads[key])
            result[tensor] = grads[key]
        return result


def backward(loss):
    """Back-propagates ``loss`` through the tape that recorded it."""
    if loss.tape is None:
        raise ContractViolation('loss was not recorded on any tape')
    return loss.tape.backward(loss)
