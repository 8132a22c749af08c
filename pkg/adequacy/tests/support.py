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
""" Toy models, corpora and oracles shared by the tests.
"""
import functools
import itertools
import os

import numpy as np

from adequacy.corpus import SyntheticTaskSpec, generate_corpus
from adequacy.discriminator import Discriminator, DiscriminatorConfig
from adequacy.generator import Generator, GeneratorConfig
from adequacy.training import TrainConfig, Trainer
from adequacy.vocab import EOS

HERE = os.path.dirname(__file__)
ROOT = os.path.dirname(os.path.dirname(HERE))
TESTS_INI = os.path.join(ROOT, 'etc', 'tests.ini')

SLOW = 'ADEQUACY_SLOW' in os.environ
SLOW_REASON = 'set ADEQUACY_SLOW to run the end-to-end checks'


def tiny_generator(src_vocab_size=6, tgt_vocab_size=5, dim=4, seed=1,
                   init_scale=0.5):
    config = GeneratorConfig(src_vocab_size, tgt_vocab_size, embed_dim=dim,
                             hidden_dim=dim, attention_dim=dim,
                             readout_dim=dim, init_scale=init_scale,
                             seed=seed)
    return Generator(config)


def tiny_discriminator(src_vocab_size=6, tgt_vocab_size=5, dim=4, seed=2,
                       cell='gru', num_layers=2):
    config = DiscriminatorConfig(src_vocab_size, tgt_vocab_size,
                                 embed_dim=dim, hidden_dim=dim,
                                 num_layers=num_layers, head_dim=dim,
                                 cell=cell, init_scale=0.5, seed=seed)
    return Discriminator(config)


def tiny_corpus(n_pairs=12, seed=3, **options):
    spec = dict(vocab_size=8, min_len=2, max_len=4, rare_vocab_size=2,
                reorder_window=2, distractor_rate=0.3, seed=seed)
    spec.update(options)
    return generate_corpus(SyntheticTaskSpec(**spec), n_pairs)


def corpus_generator(corpus, dim=6, seed=1, init_scale=0.1):
    return tiny_generator(len(corpus.src_vocab), len(corpus.tgt_vocab),
                          dim=dim, seed=seed, init_scale=init_scale)


def corpus_discriminator(corpus, dim=6, seed=2):
    return tiny_discriminator(len(corpus.src_vocab), len(corpus.tgt_vocab),
                              dim=dim, seed=seed)


@functools.lru_cache(maxsize=None)
def memorized_generator():
    """Pretrains a generator on a 10-pair corpus until it reproduces it.

    One update per epoch, so the epoch cap is also the update budget.
    Returns ``(generator, corpus, pretrain summary)``; callers must not
    train the generator further.
    """
    corpus = tiny_corpus(10, distractor_rate=0.0)
    generator = corpus_generator(corpus, dim=16)
    config = TrainConfig(optimizer='adam', learning_rate=0.02,
                         batch_size=len(corpus), pretrain_max_epochs=500,
                         patience=500)
    summary = Trainer(generator, config=config).pretrain(corpus)
    return generator, corpus, summary


def enumerate_targets(vocab_size, max_len):
    """Every sequence decoding can emit with a budget of ``max_len``.

    Returns ``(terminated, capped)``: the EOS-terminated sequences and the
    sequences of exactly ``max_len`` tokens that never emitted EOS.
    """
    content = [t for t in range(vocab_size) if t != EOS]
    terminated, capped = [], []
    for length in range(max_len):
        for prefix in itertools.product(content, repeat=length):
            terminated.append(list(prefix) + [EOS])
    for sequence in itertools.product(content, repeat=max_len):
        capped.append(list(sequence))
    return terminated, capped


def sequence_mass(generator, source, targets):
    return sum(np.exp(generator.force_decode(source, target)[0])
               for target in targets)


def flat_grads(params):
    """Gradients of a ParamSet as one vector (zeros where unset)."""
    chunks = []
    for _, tensor in params.items():
        if tensor.grad is None:
            chunks.append(np.zeros(tensor.size))
        else:
            chunks.append(tensor.grad.reshape(-1))
    return np.concatenate(chunks)


def flat_values(params):
    return np.concatenate([t.values.reshape(-1) for _, t in params.items()])


class ConstantReward(object):
    """Reward callable returning a fixed value; keeps what it scored."""
    tag = 'CONST'

    def __init__(self, value):
        self.value = value
        self.results = []

    @property
    def calls(self):
        return len(self.results)

    def __call__(self, source, reference, result):
        self.results.append(result)
        return self.value


class TokenReward(object):
    """1.0 when the translation starts with ``token``, else 0.0."""
    tag = 'TOKEN'

    def __init__(self, token):
        self.token = token

    def __call__(self, source, reference, result):
        return 1.0 if result.tokens and result.tokens[0] == self.token \
            else 0.0
