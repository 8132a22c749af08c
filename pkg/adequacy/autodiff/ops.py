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
Forward ops with their local gradient rules.

Every op checks the shapes it receives; the only broadcasting allowed is
scalar-times-tensor in ``mul``. The backward closures receive the gradient
of the output and return one gradient (or None) per input.
"""
import numbers

import numpy as np

from adequacy.autodiff.tensor import Tensor, active_tape
from adequacy.errors import ContractViolation, NumericDomainError


def _as_tensor(value):
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def _shapes(tensors):
    return ', '.join(str(t.shape) for t in tensors)


def _violation(kind, tensors, detail=''):
    msg = '%s: incompatible shapes %s' % (kind, _shapes(tensors))
    if detail:
        msg += ' (%s)' % detail
    return ContractViolation(msg)


def _emit(kind, inputs, values, backward):
    if not np.all(np.isfinite(values)):
        raise NumericDomainError('%s produced non-finite values' % kind)
    out = Tensor(values)
    tape = active_tape()
    if tape is not None and any(t.requires_grad for t in inputs):
        out.requires_grad = True
        tape.record(kind, inputs, out, backward)
    return out


def _need_2d(kind, *tensors):
    for tensor in tensors:
        if tensor.values.ndim != 2:
            raise _violation(kind, tensors, 'expected 2-D operands')


def matmul(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _need_2d('matmul', a, b)
    if a.shape[1] != b.shape[0]:
        raise _violation('matmul', (a, b), 'inner dimensions differ')
    av, bv = a.values, b.values

    def backward(grad):
        return grad @ bv.T, av.T @ grad

    return _emit('matmul', (a, b), av @ bv, backward)


def add(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    if a.shape != b.shape:
        raise _violation('add', (a, b))

    def backward(grad):
        return grad, grad

    return _emit('add', (a, b), a.values + b.values, backward)


def sub(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    if a.shape != b.shape:
        raise _violation('sub', (a, b))

    def backward(grad):
        return grad, -grad

    return _emit('sub', (a, b), a.values - b.values, backward)


def mul(a, b):
    """Elementwise product, or scalar-times-tensor when one side is a
    number or a single-element tensor."""
    if isinstance(a, numbers.Number):
        a, b = b, a
    if isinstance(b, numbers.Number):
        a = _as_tensor(a)
        factor = float(b)

        def backward_const(grad):
            return (grad * factor,)

        return _emit('mul', (a,), a.values * factor, backward_const)

    a, b = _as_tensor(a), _as_tensor(b)
    av, bv = a.values, b.values
    if a.shape == b.shape:
        def backward(grad):
            return grad * bv, grad * av
    elif b.size == 1:
        def backward(grad):
            return grad * bv, np.sum(grad * av).reshape(bv.shape)
    elif a.size == 1:
        def backward(grad):
            return np.sum(grad * bv).reshape(av.shape), grad * av
    else:
        raise _violation('mul', (a, b))

    if a.shape == b.shape:
        values = av * bv
    elif b.size == 1:
        values = av * bv.reshape(-1)[0]
    else:
        values = bv * av.reshape(-1)[0]
    return _emit('mul', (a, b), values, backward)


def concat(tensors, axis=1):
    tensors = [_as_tensor(t) for t in tensors]
    if not tensors:
        raise ContractViolation('concat: no inputs')
    ndim = tensors[0].values.ndim
    if axis >= ndim:
        raise _violation('concat', tensors, 'axis %d out of range' % axis)
    for tensor in tensors:
        shape = list(tensor.shape)
        ref = list(tensors[0].shape)
        if len(shape) != ndim:
            raise _violation('concat', tensors, 'ranks differ')
        del shape[axis]
        del ref[axis]
        if shape != ref:
            raise _violation('concat', tensors)

    extents = [t.shape[axis] for t in tensors]
    bounds = np.cumsum(extents)[:-1]

    def backward(grad):
        return np.split(grad, bounds, axis=axis)

    values = np.concatenate([t.values for t in tensors], axis=axis)
    return _emit('concat', tuple(tensors), values, backward)


def transpose(a):
    a = _as_tensor(a)
    _need_2d('transpose', a)

    def backward(grad):
        return (grad.T,)

    return _emit('transpose', (a,), a.values.T.copy(), backward)


def tanh(a):
    a = _as_tensor(a)
    values = np.tanh(a.values)

    def backward(grad):
        return (grad * (1.0 - values * values),)

    return _emit('tanh', (a,), values, backward)


def _stable_sigmoid(x):
    decay = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + decay), decay / (1.0 + decay))


def sigmoid(a):
    a = _as_tensor(a)
    values = _stable_sigmoid(a.values)

    def backward(grad):
        return (grad * values * (1.0 - values),)

    return _emit('sigmoid', (a,), values, backward)


def log_sigmoid(a):
    """log(sigmoid(a)) without going through a rounded sigmoid."""
    a = _as_tensor(a)
    values = -np.logaddexp(0.0, -a.values)

    def backward(grad):
        return (grad * _stable_sigmoid(-a.values),)

    return _emit('log_sigmoid', (a,), values, backward)


def exp(a):
    a = _as_tensor(a)
    with np.errstate(over='ignore'):
        values = np.exp(a.values)
    if not np.all(np.isfinite(values)):
        raise NumericDomainError('exp overflow on %s' % (a.shape,))

    def backward(grad):
        return (grad * values,)

    return _emit('exp', (a,), values, backward)


def log(a):
    a = _as_tensor(a)
    av = a.values
    if np.any(av <= 0.0):
        raise NumericDomainError('log of a non-positive value (min %r)'
                                 % float(av.min()))

    def backward(grad):
        return (grad / av,)

    return _emit('log', (a,), np.log(av), backward)


def row_softmax(a):
    a = _as_tensor(a)
    _need_2d('row_softmax', a)
    shifted = a.values - a.values.max(axis=1, keepdims=True)
    weights = np.exp(shifted)
    values = weights / weights.sum(axis=1, keepdims=True)

    def backward(grad):
        inner = np.sum(grad * values, axis=1, keepdims=True)
        return (values * (grad - inner),)

    return _emit('row_softmax', (a,), values, backward)


def row_log_softmax(a):
    a = _as_tensor(a)
    _need_2d('row_log_softmax', a)
    shifted = a.values - a.values.max(axis=1, keepdims=True)
    values = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))

    def backward(grad):
        probs = np.exp(values)
        return (grad - probs * grad.sum(axis=1, keepdims=True),)

    return _emit('row_log_softmax', (a,), values, backward)


def embedding_lookup(table, indices):
    """Rows of ``table`` at ``indices``, one output row per index."""
    table = _as_tensor(table)
    _need_2d('embedding_lookup', table)
    indices = np.asarray(indices, dtype=np.int64).reshape(-1)
    if indices.size == 0:
        raise ContractViolation('embedding_lookup: no indices')
    rows = table.shape[0]
    if indices.min() < 0 or indices.max() >= rows:
        raise ContractViolation('embedding_lookup: index out of range '
                                '[0, %d): %s' % (rows, indices.tolist()))

    def backward(grad):
        scattered = np.zeros(table.shape)
        np.add.at(scattered, indices, grad)
        return (scattered,)

    return _emit('embedding_lookup', (table,), table.values[indices], backward)


def sum(a):
    a = _as_tensor(a)
    shape = a.shape

    def backward(grad):
        return (np.full(shape, grad.reshape(-1)[0]),)

    return _emit('sum', (a,), np.array([a.values.sum()]), backward)


def mean(a):
    a = _as_tensor(a)
    shape, size = a.shape, a.size

    def backward(grad):
        return (np.full(shape, grad.reshape(-1)[0] / size),)

    return _emit('mean', (a,), np.array([a.values.mean()]), backward)


def squared_error(a, b):
    """Mean of the squared differences."""
    a, b = _as_tensor(a), _as_tensor(b)
    if a.shape != b.shape:
        raise _violation('squared_error', (a, b))
    diff = a.values - b.values
    size = diff.size

    def backward(grad):
        local = grad.reshape(-1)[0] * 2.0 * diff / size
        return local, -local

    return _emit('squared_error', (a, b),
                 np.array([np.mean(diff * diff)]), backward)


OPS = {
    'matmul': matmul,
    'add': add,
    'sub': sub,
    'mul': mul,
    'concat': concat,
    'transpose': transpose,
    'tanh': tanh,
    'sigmoid': sigmoid,
    'log_sigmoid': log_sigmoid,
    'exp': exp,
    'log': log,
    'row_softmax': row_softmax,
    'row_log_softmax': row_log_softmax,
    'embedding_lookup': embedding_lookup,
    'sum': sum,
    'mean': mean,
    'squared_error': squared_error,
}


def forward_op(kind, *inputs, **options):
    """Runs the op called ``kind``."""
    try:
        op = OPS[kind]
    except KeyError:
        raise ContractViolation('unknown op %r' % kind)
    return op(*inputs, **options)
