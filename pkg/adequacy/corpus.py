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
Synthetic parallel corpora built to provoke under-translation.

A source sentence is a run of frequent words ``s<i>``, optionally followed
by a short distractor clause drawn from a rare sub-vocabulary. Its
translation maps every word through a seeded one-to-one lexicon
(``s<i> -> t<perm[i]>``) and reverses the main part chunk by chunk
(``reorder_window`` words per chunk). The distractor clause is mapped in
place, so the reference always translates everything. Models trained by
maximum likelihood tend to skip the rare clause, which is what the
adequacy rewards are meant to fix.

On disk a corpus is a directory holding ``<split>.src`` / ``<split>.tgt``
(one whitespace-tokenized sentence per line) and ``vocab.src`` /
``vocab.tgt`` (one content token per line).
"""
import io
import os
from dataclasses import dataclass, asdict, fields

import numpy as np

from adequacy import logger
from adequacy.errors import ConfigError, ContractViolation
from adequacy.vocab import EOS, Vocabulary

SPLITS = ('train', 'valid', 'test')


@dataclass
class SyntheticTaskSpec:
    vocab_size: int = 50
    min_len: int = 4
    max_len: int = 10
    reorder_window: int = 2
    distractor_rate: float = 0.3
    rare_vocab_size: int = 10
    distractor_min_len: int = 2
    distractor_max_len: int = 4
    seed: int = 1

    def validate(self):
        if self.vocab_size < 2:
            raise ConfigError('vocab_size must be >= 2')
        if not 0 <= self.rare_vocab_size < self.vocab_size:
            raise ConfigError('rare_vocab_size must be in [0, vocab_size)')
        if not 1 <= self.min_len <= self.max_len:
            raise ConfigError('empty sentence length range [%d, %d]'
                              % (self.min_len, self.max_len))
        if self.reorder_window < 1:
            raise ConfigError('reorder_window must be >= 1')
        if not 0.0 <= self.distractor_rate <= 1.0:
            raise ConfigError('distractor_rate must be in [0, 1]')
        if self.distractor_rate > 0:
            if self.rare_vocab_size == 0:
                raise ConfigError('distractors need a rare vocabulary')
            if not 1 <= self.distractor_min_len <= self.distractor_max_len:
                raise ConfigError('empty distractor length range')
        return self

    @property
    def frequent_size(self):
        return self.vocab_size - self.rare_vocab_size

    def to_dict(self):
        return asdict(self)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


class Lexicon(object):
    """Seeded one-to-one word translation table."""

    def __init__(self, size, rng):
        self.size = size
        self.permutation = [int(i) for i in rng.permutation(size)]
        self._forward = dict(('s%d' % i, 't%d' % j)
                             for i, j in enumerate(self.permutation))

    def __len__(self):
        return self.size

    def source_words(self):
        return ['s%d' % i for i in range(self.size)]

    def target_words(self):
        return ['t%d' % i for i in range(self.size)]

    def translate(self, word):
        try:
            return self._forward[word]
        except KeyError:
            raise ContractViolation('%r is not in the lexicon' % word)


def reorder(words, window):
    """Reverses consecutive chunks of ``window`` words."""
    reordered = []
    for start in range(0, len(words), window):
        reordered.extend(reversed(words[start:start + window]))
    return reordered


class ParallelCorpus(object):
    """Aligned ``(source ids, target ids)`` pairs.

    Targets are EOS-terminated; sources are not.
    """
    def __init__(self, pairs, src_vocab, tgt_vocab, distractors=None):
        self.pairs = []
        for source, target in pairs:
            source, target = list(source), list(target)
            if not source:
                raise ContractViolation('empty source sentence')
            if len(target) < 2 or target[-1] != EOS or EOS in target[:-1]:
                raise ContractViolation('targets must be non-empty and end '
                                        'with a single EOS')
            self.pairs.append((source, target))
        self.src_vocab = src_vocab
        self.tgt_vocab = tgt_vocab
        if distractors is None:
            distractors = [False] * len(self.pairs)
        self.distractors = list(distractors)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __getitem__(self, index):
        return self.pairs[index]

    def subset(self, start, stop):
        return ParallelCorpus(self.pairs[start:stop], self.src_vocab,
                              self.tgt_vocab, self.distractors[start:stop])

    def sources(self):
        return [source for source, _ in self.pairs]

    def source_text(self, index):
        return self.src_vocab.render(self.pairs[index][0])

    def target_text(self, index):
        return self.tgt_vocab.render(self.pairs[index][1])


def generate_corpus(spec, n_pairs):
    """Deterministic for a given spec."""
    spec.validate()
    if n_pairs < 1:
        raise ContractViolation('n_pairs must be >= 1')
    rng = np.random.default_rng(spec.seed)
    lexicon = Lexicon(spec.vocab_size, rng)
    src_vocab = Vocabulary(lexicon.source_words())
    tgt_vocab = Vocabulary(lexicon.target_words())
    frequent, rare = spec.frequent_size, spec.rare_vocab_size

    pairs, flags = [], []
    for _ in range(n_pairs):
        length = int(rng.integers(spec.min_len, spec.max_len + 1))
        main = ['s%d' % i for i in rng.integers(0, frequent, size=length)]
        clause = []
        if rng.random() < spec.distractor_rate:
            size = int(rng.integers(spec.distractor_min_len,
                                    spec.distractor_max_len + 1))
            clause = ['s%d' % (frequent + i)
                      for i in rng.integers(0, rare, size=size)]
        translation = [lexicon.translate(w)
                       for w in reorder(main, spec.reorder_window)]
        translation += [lexicon.translate(w) for w in clause]
        pairs.append((src_vocab.encode(main + clause),
                      tgt_vocab.encode(translation, add_eos=True)))
        flags.append(bool(clause))
    logger.info('generated %d pairs, %d with a distractor clause',
                n_pairs, sum(flags))
    return ParallelCorpus(pairs, src_vocab, tgt_vocab, flags)


def split_corpus(corpus, valid_size, test_size):
    """Consecutive train / valid / test slices, train first."""
    if valid_size < 0 or test_size < 0:
        raise ContractViolation('split sizes must be >= 0')
    train_size = len(corpus) - valid_size - test_size
    if train_size < 1:
        raise ContractViolation('%d pairs cannot hold %d valid and %d test '
                                'pairs' % (len(corpus), valid_size,
                                           test_size))
    return {'train': corpus.subset(0, train_size),
            'valid': corpus.subset(train_size, train_size + valid_size),
            'test': corpus.subset(train_size + valid_size, len(corpus))}


def _write_lines(path, lines):
    with io.open(path, 'w', encoding='utf-8', newline='\n') as f:
        for line in lines:
            f.write(line + '\n')


def _read_lines(path):
    with io.open(path, encoding='utf-8') as f:
        return [line.rstrip('\n') for line in f]


def write_corpus(directory, splits):
    """Writes every split of ``{name: ParallelCorpus}`` plus the shared
    vocabularies of the first one."""
    if not splits:
        raise ContractViolation('nothing to write')
    if not os.path.isdir(directory):
        os.makedirs(directory)
    first = next(iter(splits.values()))
    first.src_vocab.write(os.path.join(directory, 'vocab.src'))
    first.tgt_vocab.write(os.path.join(directory, 'vocab.tgt'))
    for name, corpus in splits.items():
        base = os.path.join(directory, name)
        _write_lines(base + '.src', [corpus.source_text(i)
                                     for i in range(len(corpus))])
        _write_lines(base + '.tgt', [corpus.target_text(i)
                                     for i in range(len(corpus))])


def read_vocabularies(directory):
    try:
        return (Vocabulary.read(os.path.join(directory, 'vocab.src')),
                Vocabulary.read(os.path.join(directory, 'vocab.tgt')))
    except IOError as e:
        raise ContractViolation('cannot read vocabularies: %s' % e)


def read_corpus(directory, split):
    src_vocab, tgt_vocab = read_vocabularies(directory)
    base = os.path.join(directory, split)
    try:
        sources = _read_lines(base + '.src')
        targets = _read_lines(base + '.tgt')
    except IOError as e:
        raise ContractViolation('cannot read split %r: %s' % (split, e))
    if len(sources) != len(targets):
        raise ContractViolation('%s: %d source lines for %d target lines'
                                % (split, len(sources), len(targets)))
    pairs = [(src_vocab.encode(s), tgt_vocab.encode(t, add_eos=True))
             for s, t in zip(sources, targets)]
    return ParallelCorpus(pairs, src_vocab, tgt_vocab)

