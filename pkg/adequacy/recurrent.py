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
Recurrent cells built from autodiff ops.

Each cell keeps its weights in a shared ParamSet under its own prefix, so
several cells (encoder directions, decoder, discriminator layers) live in
one set that can be checkpointed and updated as a unit.
"""
import numpy as np

from adequacy.autodiff import Tensor
from adequacy.autodiff import ops
from adequacy.errors import ConfigError


class GRUCell(object):
    """h' = n + z * (h - n), that is (1 - z) * n + z * h."""

    def __init__(self, params, prefix, input_dim, hidden_dim):
        self.params = params
        self.prefix = prefix
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim

    def _name(self, name):
        return '%s.%s' % (self.prefix, name)

    def _shapes(self):
        shapes = {}
        for gate in 'zrn':
            shapes['W_' + gate] = (self.input_dim, self.hidden_dim)
            shapes['U_' + gate] = (self.hidden_dim, self.hidden_dim)
            shapes['b_' + gate] = (1, self.hidden_dim)
        return shapes

    def initialize(self, rng, scale):
        for name, shape in sorted(self._shapes().items()):
            if name.startswith('b_'):
                self.params.zeros(self._name(name), shape)
            else:
                self.params.uniform(self._name(name), shape, rng, scale)

    def validate(self):
        for name, shape in self._shapes().items():
            self.params.expect(self._name(name), shape)

    def __getitem__(self, name):
        return self.params[self._name(name)]

    def initial_state(self):
        return Tensor(np.zeros((1, self.hidden_dim)))

    def output(self, state):
        return state

    def _gate(self, gate, x, h):
        return ops.add(ops.add(ops.matmul(x, self['W_' + gate]),
                               ops.matmul(h, self['U_' + gate])),
                       self['b_' + gate])

    def step(self, x, h):
        z = ops.sigmoid(self._gate('z', x, h))
        r = ops.sigmoid(self._gate('r', x, h))
        n = ops.tanh(ops.add(
            ops.add(ops.matmul(x, self['W_n']),
                    ops.mul(r, ops.matmul(h, self['U_n']))),
            self['b_n']))
        return ops.add(n, ops.mul(z, ops.sub(h, n)))


class LSTMCell(GRUCell):
    """Long short-term memory cell; its state is an ``(h, c)`` pair."""

    def _shapes(self):
        shapes = {}
        for gate in 'ifog':
            shapes['W_' + gate] = (self.input_dim, self.hidden_dim)
            shapes['U_' + gate] = (self.hidden_dim, self.hidden_dim)
            shapes['b_' + gate] = (1, self.hidden_dim)
        return shapes

    def initial_state(self):
        zeros = np.zeros((1, self.hidden_dim))
        return Tensor(zeros), Tensor(zeros)

    def output(self, state):
        return state[0]

    def step(self, x, state):
        h, c = state
        i = ops.sigmoid(self._gate('i', x, h))
        f = ops.sigmoid(self._gate('f', x, h))
        o = ops.sigmoid(self._gate('o', x, h))
        g = ops.tanh(self._gate('g', x, h))
        c = ops.add(ops.mul(f, c), ops.mul(i, g))
        return ops.mul(o, ops.tanh(c)), c


CELLS = {'gru': GRUCell, 'lstm': LSTMCell}


def make_cell(kind, params, prefix, input_dim, hidden_dim):
    try:
        klass = CELLS[kind]
    except KeyError:
        raise ConfigError('unknown recurrent cell %r' % kind)
    return klass(params, prefix, input_dim, hidden_dim)


def run(cell, inputs, state=None):
    """Feeds a list of [1, input_dim] tensors through ``cell`` and returns
    the list of outputs."""
    if state is None:
        state = cell.initial_state()
    outputs = []
    for x in inputs:
        state = cell.step(x, state)
        outputs.append(cell.output(state))
    return outputs
