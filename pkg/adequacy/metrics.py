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
Adequacy measures and the comparison rewards.

The orientator reads the attention of a generated translation and of the
force-decoded human translation, keeps the argmax source word of every
target word (hard alignments) and compares the two sets of covered source
words::

    CDR = 1 - |C_ref - C_gen| / |C_ref|

Smoothed sentence BLEU and chrF3 are the n-gram based rewards it is
compared against.
"""
import math
from collections import Counter

import numpy as np

from adequacy import logger
from adequacy.errors import ContractViolation
from adequacy.vocab import EOS, strip_eos

CDR = 'CDR'
BLEU = 'BLEU'
CHRF3 = 'CHRF3'
KINDS = (CDR, BLEU, CHRF3)


class CoverageSet(object):
    """Source positions covered by hard alignments."""

    def __init__(self, positions, source_length):
        positions = frozenset(int(p) for p in positions)
        for position in positions:
            if not 0 <= position < source_length:
                raise ContractViolation('position %d outside source of '
                                        'length %d' % (position,
                                                       source_length))
        self.positions = positions
        self.source_length = source_length

    def __len__(self):
        return len(self.positions)

    def __iter__(self):
        return iter(sorted(self.positions))

    def __contains__(self, position):
        return position in self.positions

    def __eq__(self, other):
        return (isinstance(other, CoverageSet) and
                self.positions == other.positions and
                self.source_length == other.source_length)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.positions, self.source_length))

    def __repr__(self):
        return '<CoverageSet %s/%d>' % (sorted(self.positions),
                                        self.source_length)


class RewardScore(object):

    def __init__(self, value, kind, degenerate=False):
        if kind not in KINDS:
            raise ContractViolation('unknown reward kind %r' % kind)
        if not 0.0 <= value <= 1.0:
            raise ContractViolation('%s score %r outside [0, 1]'
                                    % (kind, value))
        self.value = float(value)
        self.kind = kind
        self.degenerate = degenerate

    def __float__(self):
        return self.value

    def __repr__(self):
        flag = ' degenerate' if self.degenerate else ''
        return '<%s %.4f%s>' % (self.kind, self.value, flag)


def hard_align(attention, tokens=None):
    """Covered source positions, one argmax per target row.

    When ``tokens`` is given, rows emitted for EOS are dropped. Ties go to
    the lowest source index.
    """
    weights = attention.weights
    if tokens is not None:
        if len(tokens) != len(weights):
            raise ContractViolation('%d tokens for %d attention rows'
                                    % (len(tokens), len(weights)))
        keep = [i for i, token in enumerate(tokens) if token != EOS]
        weights = weights[keep]
    positions = np.argmax(weights, axis=1) if len(weights) else []
    return CoverageSet(positions, attention.source_length)


def alignments(attention, tokens=None):
    """``(target_index, source_index)`` hard links, EOS rows skipped."""
    links = []
    for index, row in enumerate(attention.weights):
        if tokens is not None and tokens[index] == EOS:
            continue
        links.append((index, int(np.argmax(row))))
    return links


def cdr(c_gen, c_ref):
    if c_gen.source_length != c_ref.source_length:
        raise ContractViolation('coverage sets over different sources '
                                '(%d vs %d)' % (c_gen.source_length,
                                                c_ref.source_length))
    if len(c_ref) == 0:
        logger.debug('empty reference coverage, CDR defined as 1.0')
        return RewardScore(1.0, CDR, degenerate=True)
    missing = c_ref.positions - c_gen.positions
    return RewardScore(1.0 - float(len(missing)) / len(c_ref), CDR)


def coverage_for_pair(generator, source, reference, hypothesis):
    """``(C_gen, C_ref)``: decoding-time attention of the hypothesis and
    force-decoded attention of the reference under the same model."""
    _, ref_attention = generator.force_decode(source, reference)
    c_ref = hard_align(ref_attention, reference)
    c_gen = hard_align(hypothesis.attention, hypothesis.tokens)
    return c_gen, c_ref


def cdr_for_pair(generator, source, reference, hypothesis):
    c_gen, c_ref = coverage_for_pair(generator, source, reference,
                                     hypothesis)
    return cdr(c_gen, c_ref)


def ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n])
                   for i in range(len(tokens) - n + 1))


def sentence_bleu(hypothesis, reference, max_n=4):
    """Add-one smoothed sentence BLEU.

    Each order's clipped precision is (matches + 1) / (total + 1); an order
    the hypothesis is too short for contributes a factor of 1.
    """
    hypothesis, reference = list(hypothesis), list(reference)
    if not reference:
        raise ContractViolation('empty reference')
    if not hypothesis:
        return RewardScore(0.0, BLEU)
    log_total = 0.0
    for n in range(1, max_n + 1):
        hyp_counts = ngrams(hypothesis, n)
        total = sum(hyp_counts.values())
        if total == 0:
            continue
        matches = sum((hyp_counts & ngrams(reference, n)).values())
        log_total += math.log((matches + 1.0) / (total + 1.0))
    hyp_len, ref_len = len(hypothesis), len(reference)
    if hyp_len < ref_len:
        log_bp = 1.0 - float(ref_len) / hyp_len
    else:
        log_bp = 0.0
    score = math.exp(log_total / max_n + log_bp)
    return RewardScore(min(score, 1.0), BLEU)


def char_ngrams(text, n):
    return Counter(text[i:i + n] for i in range(len(text) - n + 1))


def chrf(hypothesis, reference, order=6, beta=3.0):
    """Character n-gram F-score of two strings, spaces included.

    Precision and recall are averaged over the orders both strings are
    long enough for.
    """
    if not hypothesis:
        return 0.0
    precision = recall = 0.0
    effective = 0
    for n in range(1, order + 1):
        hyp_counts = char_ngrams(hypothesis, n)
        ref_counts = char_ngrams(reference, n)
        hyp_total = sum(hyp_counts.values())
        ref_total = sum(ref_counts.values())
        if hyp_total == 0 or ref_total == 0:
            continue
        common = sum((hyp_counts & ref_counts).values())
        precision += float(common) / hyp_total
        recall += float(common) / ref_total
        effective += 1
    if effective == 0:
        return 0.0
    precision /= effective
    recall /= effective
    if precision + recall == 0.0:
        return 0.0
    beta2 = beta * beta
    return (1 + beta2) * precision * recall / (beta2 * precision + recall)


def chrf3(hypothesis, reference, vocab=None):
    """chrF3 of two token sequences rendered through ``vocab``.

    EOS and anything after it are not rendered. Without a vocabulary the
    tokens are rendered with ``str``.
    """
    if vocab is not None:
        hyp_text, ref_text = vocab.render(hypothesis), vocab.render(reference)
    else:
        hyp_text = ' '.join(str(t) for t in strip_eos(hypothesis))
        ref_text = ' '.join(str(t) for t in strip_eos(reference))
    if not ref_text:
        raise ContractViolation('empty reference')
    value = chrf(hyp_text, ref_text)
    return RewardScore(min(max(value, 0.0), 1.0), CHRF3)
