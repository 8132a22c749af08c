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
Scorer of (source, translation) pairs.

Two independent stacked recurrent encoders summarize the source and the
translation; their final top-layer states are concatenated and fed to a
one-hidden-layer head ending in a logistic unit. The same network is
trained either as an adequacy regressor against CDR targets or as a
human-vs-generated classifier.
"""
from collections import namedtuple
from dataclasses import dataclass, asdict

import numpy as np

from adequacy.autodiff import Tape, Tensor, no_grad
from adequacy.autodiff import ops
from adequacy.errors import ContractViolation
from adequacy.params import ParamSet
from adequacy.recurrent import make_cell, run

# keeps d_score strictly inside (0, 1) once the logistic output rounds
_EDGE = 1e-12


@dataclass
class DiscriminatorConfig:
    src_vocab_size: int
    tgt_vocab_size: int
    embed_dim: int = 16
    hidden_dim: int = 32
    num_layers: int = 2
    head_dim: int = 32
    cell: str = 'gru'
    init_scale: float = 0.1
    seed: int = 2

    def to_dict(self):
        return asdict(self)


class ScoredPair(namedtuple('ScoredPair', 'source translation target_score')):

    def __new__(cls, source, translation, target_score):
        if not 0.0 <= target_score <= 1.0:
            raise ContractViolation('target score %r outside [0, 1]'
                                    % (target_score,))
        return super(ScoredPair, cls).__new__(cls, source, translation,
                                              float(target_score))


class Discriminator(object):

    def __init__(self, config, params=None):
        self.config = config
        fresh = params is None
        self.params = ParamSet() if fresh else params
        c = config
        self.encoders = {}
        for side in ('src', 'tgt'):
            cells = []
            for layer in range(c.num_layers):
                input_dim = c.embed_dim if layer == 0 else c.hidden_dim
                cells.append(make_cell(c.cell, self.params,
                                       'disc.%s%d' % (side, layer),
                                       input_dim, c.hidden_dim))
            self.encoders[side] = cells
        if fresh:
            self._initialize(np.random.default_rng(c.seed))
        else:
            self._validate()

    def _shapes(self):
        c = self.config
        return [('disc.src_emb', (c.src_vocab_size, c.embed_dim)),
                ('disc.tgt_emb', (c.tgt_vocab_size, c.embed_dim)),
                ('disc.W1', (2 * c.hidden_dim, c.head_dim)),
                ('disc.b1', (1, c.head_dim)),
                ('disc.W2', (c.head_dim, 1)),
                ('disc.b2', (1, 1))]

    def _cells(self):
        return self.encoders['src'] + self.encoders['tgt']

    def _initialize(self, rng):
        scale = self.config.init_scale
        for name, shape in self._shapes():
            if name.startswith('disc.b'):
                self.params.zeros(name, shape)
            else:
                self.params.uniform(name, shape, rng, scale)
        for cell in self._cells():
            cell.initialize(rng, scale)

    def _validate(self):
        for name, shape in self._shapes():
            self.params.expect(name, shape)
        for cell in self._cells():
            cell.validate()

    def _summarize(self, side, tokens, vocab_size):
        if len(tokens) == 0:
            raise ContractViolation('empty %s sequence' % side)
        for token in tokens:
            if not 0 <= token < vocab_size:
                raise ContractViolation('%s token %r outside vocabulary'
                                        % (side, token))
        table = self.params['disc.%s_emb' % side]
        outputs = [ops.embedding_lookup(table, [tok]) for tok in tokens]
        for cell in self.encoders[side]:
            outputs = run(cell, outputs)
        return outputs[-1]

    def logit(self, source, translation):
        """Pre-squash score as a [1, 1] tensor."""
        c = self.config
        summary = ops.concat(
            [self._summarize('src', source, c.src_vocab_size),
             self._summarize('tgt', translation, c.tgt_vocab_size)], axis=1)
        hidden = ops.tanh(ops.add(ops.matmul(summary, self.params['disc.W1']),
                                  self.params['disc.b1']))
        return ops.add(ops.matmul(hidden, self.params['disc.W2']),
                       self.params['disc.b2'])

    def d_score(self, source, translation):
        with no_grad():
            value = ops.sigmoid(self.logit(source, translation)).item()
        return min(max(value, _EDGE), 1.0 - _EDGE)

    # objectives

    def regression_loss(self, batch):
        """Mean of |target - D|^2 over ScoredPairs."""
        if not batch:
            raise ContractViolation('empty batch')
        scores = ops.concat([ops.sigmoid(self.logit(p.source, p.translation))
                             for p in batch], axis=0)
        targets = Tensor([[p.target_score] for p in batch])
        return ops.squared_error(scores, targets)

    def adversarial_objective(self, human, generated):
        """mean log D(x, y) + mean log(1 - D(x, y_hat)), as a tensor."""
        if not human or not generated:
            raise ContractViolation('adversarial step needs both batches')
        real = ops.concat([ops.log_sigmoid(self.logit(x, y))
                           for x, y in human], axis=0)
        fake = ops.concat([ops.log_sigmoid(ops.mul(self.logit(x, y), -1.0))
                           for x, y in generated], axis=0)
        return ops.add(ops.mean(real), ops.mean(fake))

    def train_regression(self, batch, optimizer):
        """One step on the batch MSE; returns the MSE before the step."""
        with Tape() as tape:
            loss = self.regression_loss(batch)
        tape.backward(loss)
        optimizer.step()
        return loss.item()

    def train_adversarial(self, human, generated, optimizer):
        """One ascent step on the adversarial objective; returns its
        negation (the loss) before the step."""
        with Tape() as tape:
            loss = ops.mul(self.adversarial_objective(human, generated), -1.0)
        tape.backward(loss)
        optimizer.step()
        return loss.item()

    def classification_accuracy(self, human, generated):
        hits = sum(1 for x, y in human if self.d_score(x, y) > 0.5)
        hits += sum(1 for x, y in generated if self.d_score(x, y) < 0.5)
        return float(hits) / (len(human) + len(generated))

    def to_dict(self):
        return {'config': self.config.to_dict(),
                'tensors': self.params.to_dict()}

    @classmethod
    def from_dict(cls, data):
        config = DiscriminatorConfig(**data['config'])
        return cls(config, ParamSet.from_dict(data['tensors']))
