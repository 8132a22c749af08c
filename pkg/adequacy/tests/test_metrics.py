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
import math
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

try:
    from sacrebleu.metrics import CHRF
except ImportError:
    CHRF = None

from adequacy.errors import ContractViolation
from adequacy.generator import AttentionMatrix, TranslationResult
from adequacy.metrics import (BLEU, CDR, CoverageSet, RewardScore,
                              alignments, cdr, cdr_for_pair, chrf, chrf3,
                              hard_align, sentence_bleu)
from adequacy.vocab import EOS, Vocabulary
from adequacy.tests.support import tiny_generator

positions = st.sets(st.integers(0, 9), max_size=10)


def _coverage(items, length=10):
    return CoverageSet(items, length)


class TestHardAlign(unittest.TestCase):

    def test_examples(self):
        self.assertEqual(hard_align(AttentionMatrix([[1.0]])).positions,
                         frozenset([0]))
        attention = AttentionMatrix([[0.7, 0.3], [0.1, 0.9]])
        self.assertEqual(hard_align(attention).positions, frozenset([0, 1]))
        peaked = AttentionMatrix([[0.1, 0.1, 0.8]] * 4)
        self.assertEqual(hard_align(peaked).positions, frozenset([2]))

    def test_ties_and_eos(self):
        attention = AttentionMatrix([[0.5, 0.5], [0.2, 0.8]])
        self.assertEqual(hard_align(attention).positions, frozenset([0, 1]))
        self.assertEqual(hard_align(attention, [4, EOS]).positions,
                         frozenset([0]))
        self.assertEqual(alignments(attention, [4, EOS]), [(0, 0)])
        self.assertEqual(alignments(attention), [(0, 0), (1, 1)])
        self.assertRaises(ContractViolation, hard_align, attention, [4])

    def test_only_eos(self):
        coverage = hard_align(AttentionMatrix([[0.3, 0.7]]), [EOS])
        self.assertEqual(len(coverage), 0)
        self.assertEqual(coverage.source_length, 2)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6), st.integers(1, 6))
    def test_monotone_transform(self, seed, rows, cols):
        weights = np.random.default_rng(seed).dirichlet(np.ones(cols), rows)
        squashed = np.exp(3.0 * weights)
        squashed /= squashed.sum(axis=1, keepdims=True)
        self.assertEqual(hard_align(AttentionMatrix(weights)),
                         hard_align(AttentionMatrix(squashed)))


class TestCDR(unittest.TestCase):

    def test_pinned_example(self):
        score = cdr(_coverage([0, 1, 2, 3]), _coverage(range(7)))
        self.assertAlmostEqual(score.value, 4.0 / 7.0, delta=1e-9)
        self.assertEqual(score.kind, CDR)
        self.assertFalse(score.degenerate)

    def test_extremes(self):
        ref = _coverage([1, 4, 5])
        self.assertEqual(cdr(ref, ref).value, 1.0)
        self.assertEqual(cdr(_coverage([]), ref).value, 0.0)
        empty = cdr(_coverage([2]), _coverage([]))
        self.assertEqual(empty.value, 1.0)
        self.assertTrue(empty.degenerate)

    def test_contracts(self):
        self.assertRaises(ContractViolation, CoverageSet, [3], 3)
        self.assertRaises(ContractViolation, cdr, CoverageSet([0], 2),
                          CoverageSet([0], 3))
        self.assertRaises(ContractViolation, RewardScore, 1.5, CDR)
        self.assertRaises(ContractViolation, RewardScore, 0.5, 'METEOR')

    @given(positions, positions, st.integers(0, 9))
    def test_adding_to_gen_never_hurts(self, gen, ref, extra):
        before = cdr(_coverage(gen), _coverage(ref)).value
        after = cdr(_coverage(gen | set([extra])), _coverage(ref)).value
        self.assertGreaterEqual(after, before)

    @given(positions, positions)
    def test_adding_covered_to_ref_never_hurts(self, gen, ref):
        before = cdr(_coverage(gen), _coverage(ref))
        after = cdr(_coverage(gen), _coverage(ref | gen))
        if not before.degenerate:
            self.assertGreaterEqual(after.value, before.value)

    @given(positions, positions)
    def test_only_overlap_matters(self, gen, ref):
        full = cdr(_coverage(gen), _coverage(ref)).value
        overlap = cdr(_coverage(gen & ref), _coverage(ref)).value
        self.assertEqual(full, overlap)
        if ref:
            expected = 1.0 - len(ref - gen) / float(len(ref))
            self.assertEqual(full, expected)
        self.assertTrue(0.0 <= full <= 1.0)


class TestCDRForPair(unittest.TestCase):

    def test_self_consistency(self):
        gen = tiny_generator(init_scale=1.0)
        source = [4, 5, 4, 5]
        for seed in range(5):
            hypothesis = gen.sample_decode(source, 6, 1.0, seed)
            reference = hypothesis.tokens
            if reference[-1] != EOS:
                reference = reference + [EOS]
                log_prob, attention = gen.force_decode(source, reference)
                hypothesis = TranslationResult(reference,
                                               [log_prob] + [0.0] *
                                               (len(reference) - 1),
                                               attention)
            self.assertEqual(cdr_for_pair(gen, source, reference,
                                          hypothesis).value, 1.0)

    def test_constructed_attention(self):
        gen = tiny_generator()
        source = [4, 5, 4]
        reference = [3, 4, EOS]
        _, ref_attention = gen.force_decode(source, reference)
        c_ref = hard_align(ref_attention, reference)
        # hypothesis peaks on a position outside C_ref when there is one
        outside = [p for p in range(3) if p not in c_ref]
        peak = outside[0] if outside else 0
        weights = np.full((2, 3), 0.1)
        weights[:, peak] = 0.8
        hypothesis = TranslationResult([4, EOS], [-1.0, -1.0],
                                       AttentionMatrix(weights))
        expected = 1.0 - len(c_ref.positions - set([peak])) / \
            float(len(c_ref))
        self.assertAlmostEqual(cdr_for_pair(gen, source, reference,
                                            hypothesis).value,
                               expected, delta=1e-12)


def _brute_chrf(hyp, ref, order=6, beta=3.0):
    precisions, recalls = [], []
    for n in range(1, order + 1):
        hyp_grams = [hyp[i:i + n] for i in range(len(hyp) - n + 1)]
        ref_grams = [ref[i:i + n] for i in range(len(ref) - n + 1)]
        if not hyp_grams or not ref_grams:
            continue
        remaining = list(ref_grams)
        common = 0
        for gram in hyp_grams:
            if gram in remaining:
                remaining.remove(gram)
                common += 1
        precisions.append(common / float(len(hyp_grams)))
        recalls.append(common / float(len(ref_grams)))
    p = sum(precisions) / len(precisions)
    r = sum(recalls) / len(recalls)
    if p + r == 0:
        return 0.0
    return (1 + beta ** 2) * p * r / (beta ** 2 * p + r)


class TestBLEU(unittest.TestCase):

    def test_identity(self):
        self.assertEqual(sentence_bleu([4, 5, 6, 7, 8], [4, 5, 6, 7, 8]).value,
                         1.0)

    def test_short_hypothesis(self):
        score = sentence_bleu(['a', 'b'], ['a', 'b', 'c', 'd'])
        self.assertAlmostEqual(score.value, math.exp(-1.0), delta=1e-12)
        self.assertEqual(round(score.value, 4), 0.3679)
        self.assertEqual(score.kind, BLEU)

    def test_disjoint(self):
        score = sentence_bleu(['a', 'b', 'c', 'd'], ['e', 'f', 'g', 'h'])
        expected = math.exp((math.log(1 / 5.) + math.log(1 / 4.) +
                             math.log(1 / 3.) + math.log(1 / 2.)) / 4)
        self.assertAlmostEqual(score.value, expected, delta=1e-12)
        self.assertLess(score.value, 0.5)

    def test_empty(self):
        self.assertEqual(sentence_bleu([], ['a']).value, 0.0)
        self.assertRaises(ContractViolation, sentence_bleu, ['a'], [])

    @given(st.lists(st.integers(0, 5), max_size=8),
           st.lists(st.integers(0, 5), min_size=1, max_size=8))
    def test_range(self, hyp, ref):
        self.assertTrue(0.0 <= sentence_bleu(hyp, ref).value <= 1.0)


class TestChrF(unittest.TestCase):

    def test_identity_and_disjoint(self):
        self.assertEqual(chrf('abc def', 'abc def'), 1.0)
        self.assertEqual(chrf('abc', 'xyz'), 0.0)
        self.assertEqual(chrf('', 'xyz'), 0.0)

    def test_substitution_matches_brute_force(self):
        ref = 'abcdefghij'
        hyp = 'abcdXfghij'
        self.assertEqual(chrf(hyp, ref), _brute_chrf(hyp, ref))

    @settings(max_examples=100, deadline=None)
    @given(st.text('abc ', min_size=1, max_size=12),
           st.text('abc ', min_size=1, max_size=12))
    def test_brute_force(self, hyp, ref):
        self.assertAlmostEqual(chrf(hyp, ref), _brute_chrf(hyp, ref),
                               delta=1e-12)
        self.assertTrue(0.0 <= chrf(hyp, ref) <= 1.0 + 1e-12)

    @unittest.skipIf(CHRF is None, 'sacrebleu is not installed')
    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.text('abcd', min_size=1, max_size=4), min_size=1,
                    max_size=5),
           st.lists(st.text('abcd', min_size=1, max_size=4), min_size=1,
                    max_size=5))
    def test_agrees_with_sacrebleu(self, hyp_words, ref_words):
        # rendered token strings: single spaces, none at the ends
        hyp, ref = ' '.join(hyp_words), ' '.join(ref_words)
        metric = CHRF(char_order=6, word_order=0, beta=3, whitespace=True)
        expected = metric.sentence_score(hyp, [ref]).score / 100.0
        self.assertAlmostEqual(chrf(hyp, ref), expected, delta=1e-9)

    def test_chrf3_tokens(self):
        vocab = Vocabulary(['ab', 'cd', 'ef'])
        same = chrf3([4, 5, EOS], [4, 5, EOS], vocab)
        self.assertEqual(same.value, 1.0)
        self.assertEqual(chrf3([EOS], [4, EOS], vocab).value, 0.0)
        partial = chrf3([4, 6, EOS], [4, 5, EOS], vocab)
        self.assertAlmostEqual(partial.value, chrf('ab ef', 'ab cd'),
                               delta=1e-12)
        self.assertRaises(ContractViolation, chrf3, [4], [EOS], vocab)

