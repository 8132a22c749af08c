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
Attention-based encoder-decoder translation model.

The encoder is a bidirectional GRU whose states are concatenated into one
annotation per source word. At target step i the decoder scores every
annotation against its previous state s_{i-1} with an additive scorer,
builds the context c_i as the weighted sum of annotations, updates its
state from [y_{i-1}; c_i] and predicts y_i from (y_{i-1}, s_i, c_i).

All computations go through autodiff ops: under an active Tape they are
recorded and can be back-propagated, elsewhere they just evaluate.
"""
from collections import namedtuple
from dataclasses import dataclass, asdict

import numpy as np

from adequacy.autodiff import Tensor, no_grad
from adequacy.autodiff import ops
from adequacy.errors import ContractViolation
from adequacy.params import ParamSet
from adequacy.recurrent import GRUCell
from adequacy.vocab import BOS, EOS


@dataclass
class GeneratorConfig:
    src_vocab_size: int
    tgt_vocab_size: int
    embed_dim: int = 16
    hidden_dim: int = 32
    attention_dim: int = 32
    readout_dim: int = 32
    init_scale: float = 0.1
    seed: int = 1

    def to_dict(self):
        return asdict(self)


class AttentionMatrix(object):
    """I x J attention weights, one probability row per target step."""

    def __init__(self, weights, scores=None):
        weights = np.array(weights, dtype=np.float64)
        if weights.ndim != 2 or weights.shape[1] == 0:
            raise ContractViolation('attention must be a non-empty I x J '
                                    'matrix, got shape %s'
                                    % (weights.shape,))
        if weights.shape[0] and (np.any(weights < 0) or np.any(
                np.abs(weights.sum(axis=1) - 1.0) > 1e-9)):
            raise ContractViolation('attention rows must be distributions')
        self.weights = weights
        self.scores = scores

    @property
    def shape(self):
        return self.weights.shape

    @property
    def source_length(self):
        return self.weights.shape[1]

    def __len__(self):
        return self.weights.shape[0]

    def __getitem__(self, index):
        return self.weights[index]


class EncoderAnnotations(object):
    """J annotation vectors, their attention projections and the backward
    state the decoder starts from."""

    def __init__(self, matrix, keys, backward_final):
        self.matrix = matrix
        self.keys = keys
        self.backward_final = backward_final

    def __len__(self):
        return self.matrix.shape[0]


class TranslationResult(object):

    def __init__(self, tokens, step_log_probs, attention):
        self.tokens = list(tokens)
        self.step_log_probs = np.array(step_log_probs, dtype=np.float64)
        self.attention = attention
        if len(attention) != len(self.tokens):
            raise ContractViolation('one attention row per token expected')

    @property
    def total_log_prob(self):
        return float(np.sum(self.step_log_probs))

    def __len__(self):
        return len(self.tokens)

    def __repr__(self):
        return '<TranslationResult %s %.4f>' % (self.tokens,
                                                self.total_log_prob)


class DecoderStep(namedtuple('DecoderStep', 'log_probs state attention')):
    """Output of one decoding step; ``log_probs`` is a [1, V] tensor."""

    @property
    def distribution(self):
        return np.exp(self.log_probs.values[0])


def max_decode_length(source, ratio):
    """Decoding budget for a source sentence."""
    return max(2, int(ratio * len(source)) + 1)


def _one_hot_column(index, size):
    column = np.zeros((size, 1))
    column[index, 0] = 1.0
    return Tensor(column)


class Generator(object):

    def __init__(self, config, params=None):
        self.config = config
        fresh = params is None
        self.params = ParamSet() if fresh else params
        c = config
        self.enc_fwd = GRUCell(self.params, 'enc_fwd', c.embed_dim,
                               c.hidden_dim)
        self.enc_bwd = GRUCell(self.params, 'enc_bwd', c.embed_dim,
                               c.hidden_dim)
        self.decoder = GRUCell(self.params, 'dec', c.embed_dim +
                               2 * c.hidden_dim, c.hidden_dim)
        if fresh:
            self._initialize(np.random.default_rng(c.seed))
        else:
            self._validate()

    def _shapes(self):
        c = self.config
        annotation = 2 * c.hidden_dim
        return [('src_emb', (c.src_vocab_size, c.embed_dim)),
                ('tgt_emb', (c.tgt_vocab_size, c.embed_dim)),
                ('init.W', (c.hidden_dim, c.hidden_dim)),
                ('init.b', (1, c.hidden_dim)),
                ('att.W', (c.hidden_dim, c.attention_dim)),
                ('att.U', (annotation, c.attention_dim)),
                ('att.v', (c.attention_dim, 1)),
                ('out.W1', (c.embed_dim + c.hidden_dim + annotation,
                            c.readout_dim)),
                ('out.b1', (1, c.readout_dim)),
                ('out.W2', (c.readout_dim, c.tgt_vocab_size)),
                ('out.b2', (1, c.tgt_vocab_size))]

    def _initialize(self, rng):
        scale = self.config.init_scale
        for name, shape in self._shapes():
            if name.rsplit('.', 1)[-1].startswith('b'):
                self.params.zeros(name, shape)
            else:
                self.params.uniform(name, shape, rng, scale)
        for cell in (self.enc_fwd, self.enc_bwd, self.decoder):
            cell.initialize(rng, scale)

    def _validate(self):
        for name, shape in self._shapes():
            self.params.expect(name, shape)
        for cell in (self.enc_fwd, self.enc_bwd, self.decoder):
            cell.validate()

    def _check_tokens(self, tokens, vocab_size, what):
        if len(tokens) == 0:
            raise ContractViolation('empty %s sequence' % what)
        for token in tokens:
            if not 0 <= token < vocab_size:
                raise ContractViolation('%s token %r outside vocabulary of '
                                        'size %d' % (what, token, vocab_size))

    # encoder / attention / decoder step

    def encode(self, source):
        self._check_tokens(source, self.config.src_vocab_size, 'source')
        table = self.params['src_emb']
        embedded = [ops.embedding_lookup(table, [tok]) for tok in source]
        forward = []
        state = self.enc_fwd.initial_state()
        for x in embedded:
            state = self.enc_fwd.step(x, state)
            forward.append(state)
        backward = []
        state = self.enc_bwd.initial_state()
        for x in reversed(embedded):
            state = self.enc_bwd.step(x, state)
            backward.append(state)
        backward.reverse()
        rows = [ops.concat([f, b], axis=1) for f, b in zip(forward, backward)]
        matrix = ops.concat(rows, axis=0)
        keys = ops.matmul(matrix, self.params['att.U'])
        return EncoderAnnotations(matrix, keys, backward[0])

    def initial_state(self, annotations):
        return ops.tanh(ops.add(ops.matmul(annotations.backward_final,
                                           self.params['init.W']),
                                self.params['init.b']))

    def attend(self, state, annotations):
        """Returns ``(context, weights)`` for decoder state s_{i-1}."""
        length = len(annotations)
        if length < 1:
            raise ContractViolation('attention over zero annotations')
        query = ops.matmul(state, self.params['att.W'])
        tiled = ops.matmul(Tensor(np.ones((length, 1))), query)
        scores = ops.matmul(ops.tanh(ops.add(tiled, annotations.keys)),
                            self.params['att.v'])
        weights = ops.row_softmax(ops.transpose(scores))
        context = ops.matmul(weights, annotations.matrix)
        return context, weights

    def decode_step(self, prev_token, state, annotations):
        if not 0 <= prev_token < self.config.tgt_vocab_size:
            raise ContractViolation('previous token %r outside target '
                                    'vocabulary' % (prev_token,))
        context, weights = self.attend(state, annotations)
        prev = ops.embedding_lookup(self.params['tgt_emb'], [prev_token])
        new_state = self.decoder.step(ops.concat([prev, context], axis=1),
                                      state)
        readout = ops.tanh(ops.add(
            ops.matmul(ops.concat([prev, new_state, context], axis=1),
                       self.params['out.W1']),
            self.params['out.b1']))
        logits = ops.add(ops.matmul(readout, self.params['out.W2']),
                         self.params['out.b2'])
        return DecoderStep(ops.row_log_softmax(logits), new_state, weights)

    # decoding

    def _decode(self, source, max_len, choose):
        if max_len < 1:
            raise ContractViolation('max_len must be at least 1')
        tokens, log_probs, rows = [], [], []
        with no_grad():
            annotations = self.encode(source)
            state = self.initial_state(annotations)
            prev = BOS
            for _ in range(max_len):
                step = self.decode_step(prev, state, annotations)
                row = step.log_probs.values[0]
                token = choose(row)
                tokens.append(token)
                log_probs.append(row[token])
                rows.append(step.attention.values[0])
                if token == EOS:
                    break
                prev, state = token, step.state
        return TranslationResult(tokens, log_probs, AttentionMatrix(rows))

    def greedy_decode(self, source, max_len):
        # np.argmax keeps the lowest index on ties
        return self._decode(source, max_len, lambda row: int(np.argmax(row)))

    def sample_decode(self, source, max_len, sharpness, rng_seed):
        """Samples each token from p^sharpness (renormalized); the recorded
        log-probs are those of the unsharpened model."""
        if sharpness <= 0:
            raise ContractViolation('sharpness must be positive')
        rng = np.random.default_rng(rng_seed)

        def choose(row):
            scaled = sharpness * (row - row.max())
            weights = np.exp(scaled)
            weights /= weights.sum()
            return int(rng.choice(len(weights), p=weights))

        return self._decode(source, max_len, choose)

    def sequence_log_prob(self, source, target):
        """log G(target | source) as a tensor, plus the attention matrix.

        Recorded on the active tape, if any, so it can be differentiated.
        """
        self._check_tokens(target, self.config.tgt_vocab_size, 'target')
        size = self.config.tgt_vocab_size
        annotations = self.encode(source)
        state = self.initial_state(annotations)
        prev = BOS
        picked, rows = [], []
        for token in target:
            step = self.decode_step(prev, state, annotations)
            picked.append(ops.matmul(step.log_probs,
                                     _one_hot_column(token, size)))
            rows.append(step.attention.values[0])
            prev, state = token, step.state
        total = ops.matmul(Tensor(np.ones((1, len(picked)))),
                           ops.concat(picked, axis=0))
        return total, AttentionMatrix(rows)

    def force_decode(self, source, target):
        """Returns ``(log_prob, attention)`` of a fixed target."""
        with no_grad():
            total, attention = self.sequence_log_prob(source, target)
        return total.item(), attention

    def mle_loss(self, batch):
        """Negative mean per-sentence log-likelihood."""
        if not batch:
            raise ContractViolation('empty batch')
        terms = [self.sequence_log_prob(source, target)[0]
                 for source, target in batch]
        return ops.mul(ops.mean(ops.concat(terms, axis=0)), -1.0)

    def nll_per_token(self, pairs):
        total, tokens = 0.0, 0
        for source, target in pairs:
            log_prob, _ = self.force_decode(source, target)
            total -= log_prob
            tokens += len(target)
        if tokens == 0:
            raise ContractViolation('no target tokens')
        return total / tokens

    def to_dict(self):
        return {'config': self.config.to_dict(),
                'tensors': self.params.to_dict()}

    @classmethod
    def from_dict(cls, data):
        config = GeneratorConfig(**data['config'])
        return cls(config, ParamSet.from_dict(data['tensors']))
