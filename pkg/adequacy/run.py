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
Command-line entry point.

    adequacy [--ini FILE] [--seed N] <command> ...

Logging is configured from the ini file when it has logging sections.
"""
import argparse
import logging
import os
import sys
from configparser import NoSectionError
from logging.config import fileConfig

from adequacy import logger
from adequacy.config import load_config
from adequacy.corpus import SPLITS, generate_corpus, read_corpus, \
    split_corpus, write_corpus
from adequacy.errors import AdequacyError, ContractViolation
from adequacy.evaluation import EvalReport, evaluate, render_summary, \
    write_csv
from adequacy.metrics import CoverageSet, alignments, cdr, \
    coverage_for_pair
from adequacy.generator import max_decode_length
from adequacy.training import DISC_MODES, Trainer
from adequacy.util import TrainingLog, json_dumps, load_checkpoint, \
    parse_positions, save_checkpoint, write_json

REWARDS = ('cdr', 'bleu', 'chrf3')


def setup_logging(ini_file, verbose=False):
    level = logging.DEBUG if verbose else logging.INFO
    if ini_file is not None and not ini_file.endswith('.json'):
        try:
            fileConfig(ini_file, disable_existing_loggers=False)
            return
        except (NoSectionError, KeyError, OSError, RuntimeError,
                ValueError):
            pass
    logging.basicConfig(level=level,
                        format='%(asctime)s %(levelname)-5.5s [%(name)s] '
                               '%(message)s')


def _experiment(args):
    config = load_config(args.ini)
    if args.seed is not None:
        config.train.seed = args.seed
        config.corpus.seed = args.seed
        config.model['seed'] = args.seed
        config.discriminator['seed'] = args.seed + 1
    return config


def _trainer(args, config, generator, discriminator=None, vocab=None):
    log = TrainingLog(args.log) if getattr(args, 'log', None) else None
    return Trainer(generator, discriminator, config.train, vocab, log,
                   checkpoint_path=args.out)


def _save(args, config, trainer):
    save_checkpoint(args.out, trainer.generator, trainer.discriminator,
                    {'train': config.train.to_dict()})
    if trainer.log is not None:
        trainer.log.close()
    logger.info('checkpoint written to %s', args.out)


def _load(path):
    generator, discriminator, _ = load_checkpoint(path)
    return generator, discriminator


# commands

def gen_corpus(args):
    config = _experiment(args)
    corpus = generate_corpus(config.corpus, args.pairs)
    splits = split_corpus(corpus, args.valid, args.test)
    write_corpus(args.out, splits)
    logger.info('corpus written to %s (%s)', args.out,
                ', '.join('%s=%d' % (name, len(split))
                          for name, split in splits.items()))
    return 0


def train_mle(args):
    config = _experiment(args)
    if args.epochs is not None:
        config.train.pretrain_max_epochs = args.epochs
    train = read_corpus(args.corpus, 'train')
    valid = read_corpus(args.corpus, 'valid')
    if args.init:
        generator, _ = _load(args.init)
    else:
        generator = config.build_generator(train.src_vocab, train.tgt_vocab)
    trainer = _trainer(args, config, generator, vocab=train.tgt_vocab)
    trainer.pretrain(train, valid if len(valid) else None)
    _save(args, config, trainer)
    return 0


def train_rl(args):
    config = _experiment(args)
    train = read_corpus(args.corpus, 'train')
    generator, discriminator = _load(args.init)
    trainer = _trainer(args, config, generator, discriminator,
                       train.tgt_vocab)
    reward = trainer.reward(args.reward.upper())
    for epoch in range(args.epochs):
        mean = trainer.generator_epoch(train, reward)
        logger.info('epoch %d: mean %s reward %s', epoch + 1, reward.tag,
                    'n/a' if mean is None else '%.4f' % mean)
    _save(args, config, trainer)
    return 0


def train_mrt(args):
    config = _experiment(args)
    train = read_corpus(args.corpus, 'train')
    generator, discriminator = _load(args.init)
    trainer = _trainer(args, config, generator, discriminator,
                       train.tgt_vocab)
    reward = trainer.reward(args.reward.upper())
    for epoch in range(args.epochs):
        risk = trainer.mrt_epoch(train, reward)
        logger.info('epoch %d: expected %s risk %.4f', epoch + 1,
                    reward.tag, risk)
    _save(args, config, trainer)
    return 0


def train_adv(args):
    config = _experiment(args)
    config.train.disc_mode = args.disc_mode
    train = read_corpus(args.corpus, 'train')
    generator, discriminator = _load(args.init)
    fresh = discriminator is None
    if fresh:
        discriminator = config.build_discriminator(train.src_vocab,
                                                   train.tgt_vocab)
    trainer = _trainer(args, config, generator, discriminator,
                       train.tgt_vocab)
    if fresh:
        for _ in range(config.train.disc_pretrain_epochs):
            trainer.discriminator_epoch(train)
    for _ in range(args.rounds):
        trainer.adversarial_round(train)
    _save(args, config, trainer)
    return 0


def evaluate_cmd(args):
    config = _experiment(args)
    corpus = read_corpus(args.corpus, args.split)
    generator, _ = _load(args.checkpoint)
    workers = args.workers or config.train.workers
    report = evaluate(generator, corpus,
                      max_len_ratio=config.train.max_len_ratio,
                      workers=workers)
    if args.out:
        report.write(args.out)
    else:
        print(report.to_json())
    return 0


def cdr_cmd(args):
    c_gen, c_ref = parse_positions(args.cgen), parse_positions(args.cref)
    length = args.source_length
    if length is None:
        length = max(c_gen + c_ref + [-1]) + 1
    if length < 1:
        raise ContractViolation('cannot infer a source length from empty '
                                'coverage sets')
    score = cdr(CoverageSet(c_gen, length), CoverageSet(c_ref, length))
    print('%.4f' % score.value)
    return 0


def align(args):
    config = _experiment(args)
    corpus = read_corpus(args.corpus, args.split)
    generator, _ = _load(args.checkpoint)
    if not 0 <= args.index < len(corpus):
        raise ContractViolation('no sentence %d in %s' % (args.index,
                                                          args.split))
    source, reference = corpus[args.index]
    hypothesis = generator.greedy_decode(
        source, max_decode_length(source, config.train.max_len_ratio))
    for target_index, source_index in alignments(hypothesis.attention,
                                                 hypothesis.tokens):
        print('%d\t%d' % (target_index, source_index))
    c_gen, c_ref = coverage_for_pair(generator, source, reference,
                                     hypothesis)
    summary = {'c_gen': list(c_gen), 'c_ref': list(c_ref),
               'cdr': cdr(c_gen, c_ref).value}
    if args.summary:
        write_json(args.summary, summary)
    else:
        logger.info('coverage: %s', json_dumps(summary))
    return 0


def report(args):
    names = args.names or [os.path.splitext(os.path.basename(path))[0]
                           for path in args.reports]
    if len(names) != len(args.reports):
        raise ContractViolation('%d names for %d reports'
                                % (len(names), len(args.reports)))
    reports = [(name, EvalReport.read(path))
               for name, path in zip(names, args.reports)]
    if args.csv:
        write_csv(args.csv, reports)
    sys.stdout.write(render_summary(reports))
    return 0


def make_parser():
    parser = argparse.ArgumentParser(
        prog='adequacy',
        description='Adequacy-oriented training of attention-based '
                    'translation models.')
    parser.add_argument('--ini', help='experiment config (.ini or .json)')
    parser.add_argument('--seed', type=int, default=None,
                        help='overrides every configured seed')
    parser.add_argument('-v', '--verbose', action='store_true')
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    cmd = commands.add_parser('gen-corpus', help='write a synthetic corpus')
    cmd.add_argument('--out', required=True, help='corpus directory')
    cmd.add_argument('--pairs', type=int, default=2400)
    cmd.add_argument('--valid', type=int, default=200)
    cmd.add_argument('--test', type=int, default=200)
    cmd.set_defaults(func=gen_corpus)

    cmd = commands.add_parser('train-mle', help='maximum likelihood '
                              'pretraining')
    cmd.add_argument('--corpus', required=True)
    cmd.add_argument('--out', required=True, help='checkpoint to write')
    cmd.add_argument('--init', help='checkpoint to start from')
    cmd.add_argument('--epochs', type=int, default=None)
    cmd.add_argument('--log', help='JSON-lines training log')
    cmd.set_defaults(func=train_mle)

    cmd = commands.add_parser('train-rl', help='REINFORCE on a reward')
    cmd.add_argument('--corpus', required=True)
    cmd.add_argument('--init', required=True)
    cmd.add_argument('--out', required=True)
    cmd.add_argument('--reward', choices=REWARDS, default='cdr')
    cmd.add_argument('--epochs', type=int, default=1)
    cmd.add_argument('--log')
    cmd.set_defaults(func=train_rl)

    cmd = commands.add_parser('train-mrt', help='minimum risk training')
    cmd.add_argument('--corpus', required=True)
    cmd.add_argument('--init', required=True)
    cmd.add_argument('--out', required=True)
    cmd.add_argument('--reward', choices=REWARDS, default='bleu')
    cmd.add_argument('--epochs', type=int, default=1)
    cmd.add_argument('--log')
    cmd.set_defaults(func=train_mrt)

    cmd = commands.add_parser('train-adv', help='adversarial rounds')
    cmd.add_argument('--corpus', required=True)
    cmd.add_argument('--init', required=True)
    cmd.add_argument('--out', required=True)
    cmd.add_argument('--disc-mode', choices=DISC_MODES,
                     default='regression')
    cmd.add_argument('--rounds', type=int, default=1)
    cmd.add_argument('--log')
    cmd.set_defaults(func=train_adv)

    cmd = commands.add_parser('evaluate', help='score a checkpoint')
    cmd.add_argument('--checkpoint', required=True)
    cmd.add_argument('--corpus', required=True)
    cmd.add_argument('--split', default='test', choices=SPLITS)
    cmd.add_argument('--out', help='JSON report (stdout otherwise)')
    cmd.add_argument('--workers', type=int, default=None)
    cmd.set_defaults(func=evaluate_cmd)

    cmd = commands.add_parser('cdr', help='CDR of two coverage sets')
    cmd.add_argument('--cgen', required=True, help='e.g. 0,1,2,3')
    cmd.add_argument('--cref', required=True)
    cmd.add_argument('--source-length', type=int, default=None)
    cmd.set_defaults(func=cdr_cmd)

    cmd = commands.add_parser('align', help='dump hard alignments')
    cmd.add_argument('--checkpoint', required=True)
    cmd.add_argument('--corpus', required=True)
    cmd.add_argument('--split', default='test', choices=SPLITS)
    cmd.add_argument('--index', type=int, default=0)
    cmd.add_argument('--summary', help='coverage summary JSON file')
    cmd.set_defaults(func=align)

    cmd = commands.add_parser('report', help='bucket tables as CSV')
    cmd.add_argument('reports', nargs='+', help='evaluation reports')
    cmd.add_argument('--names', nargs='+')
    cmd.add_argument('--csv', help='CSV file to write')
    cmd.set_defaults(func=report)
    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    setup_logging(args.ini, args.verbose)
    try:
        return args.func(args)
    except (AdequacyError, OSError) as e:
        logger.error('%s failed: %s', args.command, e)
        return 1


if __name__ == '__main__':
    sys.exit(main())
