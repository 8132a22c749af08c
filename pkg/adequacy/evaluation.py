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
Corpus-level evaluation.

Every source is decoded greedily and scored with sentence BLEU, CDR and
chrF3. Scores are averaged over the corpus and over source-length buckets
``(lo, hi]``.
"""
import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from mako.template import Template

from adequacy import logger
from adequacy.errors import ContractViolation
from adequacy.generator import max_decode_length
from adequacy.metrics import cdr_for_pair, chrf3, sentence_bleu
from adequacy.util import json_dumps
from adequacy.vocab import strip_eos

DEFAULT_BUCKET_EDGES = (0, 15, 30, 45, math.inf)
METRICS = ('bleu', 'cdr', 'chrf3')
CSV_HEADER = ('system', 'bucket', 'count', 'bleu', 'cdr', 'chrf3')

_SUMMARY = os.path.join(os.path.dirname(__file__), 'templates',
                        'summary.mako')


class SentenceScore(object):

    def __init__(self, length, bleu, cdr, chrf3, degenerate=False):
        self.length = length
        self.bleu = bleu
        self.cdr = cdr
        self.chrf3 = chrf3
        self.degenerate = degenerate


def _mean(scores, metric):
    if not scores:
        return None
    return float(np.mean([getattr(s, metric) for s in scores]))


def _edge(value):
    return None if math.isinf(value) else value


def bucket_label(lo, hi):
    return '(%s,%s]' % (lo, 'inf' if hi is None else hi)


class EvalReport(object):
    """Overall and per-bucket means. A bucket with no sentence has
    ``count`` 0 and ``None`` means."""

    def __init__(self, overall, buckets, degenerate=0):
        self.overall = overall
        self.buckets = buckets
        self.degenerate = degenerate

    @property
    def count(self):
        return self.overall['count']

    def __getitem__(self, metric):
        return self.overall[metric]

    @classmethod
    def from_scores(cls, scores, bucket_edges=DEFAULT_BUCKET_EDGES):
        edges = list(bucket_edges)
        if len(edges) < 2 or any(a >= b for a, b in zip(edges, edges[1:])):
            raise ContractViolation('bucket edges must be increasing')
        grouped = [[] for _ in edges[1:]]
        for score in scores:
            for index, (lo, hi) in enumerate(zip(edges, edges[1:])):
                if lo < score.length <= hi:
                    grouped[index].append(score)
                    break
            else:
                raise ContractViolation('source length %d outside the '
                                        'buckets' % score.length)
        buckets = []
        for (lo, hi), members in zip(zip(edges, edges[1:]), grouped):
            bucket = {'lo': _edge(lo), 'hi': _edge(hi),
                      'count': len(members)}
            for metric in METRICS:
                bucket[metric] = _mean(members, metric)
            buckets.append(bucket)
        overall = {'count': len(scores)}
        for metric in METRICS:
            overall[metric] = _mean(scores, metric)
        degenerate = sum(1 for s in scores if s.degenerate)
        return cls(overall, buckets, degenerate)

    def to_dict(self):
        return {'overall': self.overall, 'buckets': self.buckets,
                'degenerate_cdr': self.degenerate}

    def to_json(self):
        return json_dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(data['overall'], data['buckets'],
                       data.get('degenerate_cdr', 0))
        except (KeyError, TypeError):
            raise ContractViolation('malformed evaluation report')

    @classmethod
    def read(cls, path):
        try:
            with io.open(path, encoding='utf-8') as f:
                return cls.from_dict(json.load(f))
        except (IOError, ValueError) as e:
            raise ContractViolation('cannot read report %s: %s' % (path, e))

    def write(self, path):
        with io.open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(self.to_json() + '\n')


def score_sentence(generator, source, reference, max_len_ratio=1.5,
                   vocab=None):
    hypothesis = generator.greedy_decode(
        source, max_decode_length(source, max_len_ratio))
    coverage = cdr_for_pair(generator, source, reference, hypothesis)
    return SentenceScore(
        len(source),
        sentence_bleu(strip_eos(hypothesis.tokens),
                      strip_eos(reference)).value,
        coverage.value,
        chrf3(hypothesis.tokens, reference, vocab).value,
        coverage.degenerate)


def evaluate(generator, corpus, bucket_edges=DEFAULT_BUCKET_EDGES,
             max_len_ratio=1.5, workers=1):
    """Decodes and scores every pair of ``corpus``.

    The generator is only read, so sentences can be scored by a pool of
    ``workers`` threads; results keep corpus order.
    """
    pairs = list(corpus)
    if not pairs:
        raise ContractViolation('cannot evaluate an empty corpus')
    vocab = getattr(corpus, 'tgt_vocab', None)

    def score(pair):
        return score_sentence(generator, pair[0], pair[1], max_len_ratio,
                              vocab)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            scores = list(executor.map(score, pairs))
    else:
        scores = [score(pair) for pair in pairs]
    report = EvalReport.from_scores(scores, bucket_edges)
    logger.info('evaluated %d sentences: BLEU %.4f CDR %.4f chrF3 %.4f',
                report.count, report['bleu'], report['cdr'],
                report['chrf3'])
    return report


def _cell(value):
    return '' if value is None else '%.6f' % value


def report_rows(reports):
    """CSV rows for ``[(system name, EvalReport)]``, one per bucket and
    one ``all`` row per system."""
    rows = [CSV_HEADER]
    for name, report in reports:
        for bucket in report.buckets:
            rows.append((name, bucket_label(bucket['lo'], bucket['hi']),
                         str(bucket['count'])) +
                        tuple(_cell(bucket[m]) for m in METRICS))
        rows.append((name, 'all', str(report.count)) +
                    tuple(_cell(report[m]) for m in METRICS))
    return rows


def write_csv(path, reports):
    with io.open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerows(report_rows(reports))


def render_summary(reports):
    """Plain-text table of ``[(system name, EvalReport)]``."""
    template = Template(filename=_SUMMARY)
    return template.render(reports=reports, metrics=METRICS,
                           label=bucket_label, cell=_cell)
