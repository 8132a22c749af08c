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
Parameter-update strategies for the generator and the discriminator.

- MLE: minimize the negative log-likelihood of the references.
- REINFORCE: draw one translation per source sentence and descend on
  -(r - baseline) * log G(y_hat | x), where r comes from a RewardFunction
  (CDR, BLEU, chrF3 or the discriminator).
- Orientator only: REINFORCE with the CDR reward.
- MRT: draw several translations, renormalize their probabilities with a
  sharpness exponent and minimize the expected (1 - reward).
- Adversarial rounds: alternately train the generator against a frozen
  discriminator and the discriminator against a frozen generator, mixing
  plain MLE minibatches into the generator phase.

A component that is not being trained is only ever read: its parameters
stay bit-identical, which ``ParamSet.fingerprint`` lets callers check.
"""
import time
from collections import namedtuple
from dataclasses import dataclass, asdict, fields

import numpy as np

from adequacy import logger
from adequacy.autodiff import Tape, Tensor
from adequacy.autodiff import ops
from adequacy.discriminator import ScoredPair
from adequacy.errors import ConfigError, ContractViolation
from adequacy.generator import max_decode_length
from adequacy.metrics import cdr_for_pair, chrf3, sentence_bleu
from adequacy.optim import make_optimizer
from adequacy.util import save_checkpoint
from adequacy.vocab import strip_eos

DISCRIMINATOR = 'DISCRIMINATOR'
REWARD_TAGS = ('CDR', 'BLEU', 'CHRF3', DISCRIMINATOR)
DISC_MODES = ('binary', 'regression')


@dataclass
class TrainConfig:
    learning_rate: float = 0.1
    sharpness: float = 1.0
    reward_baseline: float = 1e-4
    mle_mix_ratio: float = 0.5
    mrt_sample_size: int = 25
    mrt_alpha: float = 5e-3
    g_steps: int = 1
    d_steps: int = 1
    disc_mode: str = 'regression'
    disc_learning_rate: float = 0.1
    batch_size: int = 16
    max_len_ratio: float = 1.5
    clip_norm: float = 5.0
    optimizer: str = 'sgd'
    pretrain_max_epochs: int = 30
    patience: int = 2
    disc_pretrain_epochs: int = 2
    checkpoint_every: int = 0
    workers: int = 1
    seed: int = 1234

    def validate(self):
        if self.learning_rate <= 0 or self.disc_learning_rate <= 0:
            raise ConfigError('learning rates must be positive')
        if self.sharpness <= 0:
            raise ConfigError('sharpness must be positive')
        if self.reward_baseline < 0:
            raise ConfigError('reward_baseline must be >= 0')
        if not 0.0 <= self.mle_mix_ratio <= 1.0:
            raise ConfigError('mle_mix_ratio must be in [0, 1]')
        if self.mrt_sample_size < 2:
            raise ConfigError('mrt_sample_size must be >= 2')
        if self.g_steps < 0 or self.d_steps < 0:
            raise ConfigError('schedule counts must be >= 0')
        if self.disc_mode not in DISC_MODES:
            raise ConfigError('disc_mode must be one of %s'
                              % ', '.join(DISC_MODES))
        if self.batch_size < 1:
            raise ConfigError('batch_size must be >= 1')
        return self

    def to_dict(self):
        return asdict(self)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


class RewardFunction(object):
    """Sequence-level reward in [0, 1] for a sampled translation.

    ``reward(source, reference, result)`` where ``result`` is a
    TranslationResult; CDR needs the generator (to force-decode the
    reference), DISCRIMINATOR needs the discriminator.
    """
    def __init__(self, tag, generator=None, discriminator=None, vocab=None):
        if tag not in REWARD_TAGS:
            raise ContractViolation('unknown reward %r' % tag)
        if tag == 'CDR' and generator is None:
            raise ContractViolation('CDR reward needs the generator')
        if tag == DISCRIMINATOR and discriminator is None:
            raise ContractViolation('discriminator reward needs a '
                                    'discriminator')
        self.tag = tag
        self.generator = generator
        self.discriminator = discriminator
        self.vocab = vocab
        self.calls = 0

    def __call__(self, source, reference, result):
        self.calls += 1
        if self.tag == 'CDR':
            value = cdr_for_pair(self.generator, source, reference,
                                 result).value
        elif self.tag == 'BLEU':
            value = sentence_bleu(strip_eos(result.tokens),
                                  strip_eos(reference)).value
        elif self.tag == 'CHRF3':
            value = chrf3(result.tokens, reference, self.vocab).value
        else:
            value = self.discriminator.d_score(source, result.tokens)
        return check_reward(value, self.tag)

    def __repr__(self):
        return '<RewardFunction %s>' % self.tag


def check_reward(value, tag='reward'):
    if not 0.0 <= value <= 1.0:
        raise ContractViolation('%s value %r outside [0, 1]' % (tag, value))
    return value


PolicyGradient = namedtuple('PolicyGradient', 'loss mean_reward samples')


class Trainer(object):
    """Owns the optimizers, the random stream and the step counter for one
    generator (and optionally one discriminator)."""

    def __init__(self, generator, discriminator=None, config=None,
                 vocab=None, log=None, checkpoint_path=None):
        self.config = (config or TrainConfig()).validate()
        self.generator = generator
        self.discriminator = discriminator
        self.vocab = vocab
        self.log = log
        self.checkpoint_path = checkpoint_path
        self.rng = np.random.default_rng(self.config.seed)
        cfg = self.config
        self.g_optimizer = make_optimizer(cfg.optimizer, generator.params,
                                          cfg.learning_rate, cfg.clip_norm)
        self.d_optimizer = None
        if discriminator is not None:
            self.d_optimizer = make_optimizer(cfg.optimizer,
                                              discriminator.params,
                                              cfg.disc_learning_rate,
                                              cfg.clip_norm)
        self.step_count = 0

    # helpers

    def reward(self, tag):
        return RewardFunction(tag, self.generator, self.discriminator,
                              self.vocab)

    def max_len(self, source):
        return max_decode_length(source, self.config.max_len_ratio)

    def _seed(self):
        return int(self.rng.integers(0, 2 ** 31 - 1))

    def sample(self, source, sharpness=None):
        if sharpness is None:
            sharpness = self.config.sharpness
        return self.generator.sample_decode(source, self.max_len(source),
                                            sharpness, self._seed())

    def minibatches(self, corpus):
        pairs = list(corpus)
        order = self.rng.permutation(len(pairs))
        size = self.config.batch_size
        for start in range(0, len(pairs), size):
            yield [pairs[i] for i in order[start:start + size]]

    def _finish_step(self, mode, optimizer, loss, started, mean_reward=None):
        grad_norm = optimizer.step()
        self.step_count += 1
        if self.log is not None:
            self.log.write(self.step_count, mode, loss, grad_norm, started,
                           mean_reward)
        every = self.config.checkpoint_every
        if every and self.checkpoint_path and self.step_count % every == 0:
            save_checkpoint(self.checkpoint_path, self.generator,
                            self.discriminator)
        return grad_norm

    # generator updates

    def mle_step(self, batch):
        started = time.time()
        with Tape() as tape:
            loss = self.generator.mle_loss(batch)
        tape.backward(loss)
        self._finish_step('mle', self.g_optimizer, loss.item(), started)
        return loss.item()

    def reinforce_gradients(self, batch, reward):
        """Accumulates the REINFORCE gradient of one minibatch on the
        generator parameters without applying it."""
        if not batch:
            raise ContractViolation('empty batch')
        baseline = self.config.reward_baseline
        samples, values = [], []
        for source, reference in batch:
            result = self.sample(source)
            samples.append(result)
            values.append(check_reward(reward(source, reference, result)))
        with Tape() as tape:
            terms = []
            for (source, _), result, value in zip(batch, samples, values):
                log_prob, _ = self.generator.sequence_log_prob(
                    source, result.tokens)
                terms.append(ops.mul(log_prob, -(value - baseline)))
            loss = ops.mean(ops.concat(terms, axis=0))
        tape.backward(loss)
        return PolicyGradient(loss.item(), float(np.mean(values)), samples)

    def reinforce_step(self, batch, reward):
        """One policy-gradient update; returns the mean raw reward."""
        started = time.time()
        gradient = self.reinforce_gradients(batch, reward)
        self._finish_step('rl-%s' % reward.tag.lower(), self.g_optimizer,
                          gradient.loss, started, gradient.mean_reward)
        return gradient.mean_reward

    def orientator_only_step(self, batch):
        return self.reinforce_step(batch, self.reward('CDR'))

    def expected_risk(self, source, samples, deltas):
        """sum_s Q(s) * delta_s with Q proportional to P(s)^alpha over the
        sample set, as a [1, 1] tensor."""
        if len(samples) != len(deltas) or not samples:
            raise ContractViolation('one delta per sample expected')
        log_probs = [self.generator.sequence_log_prob(source, s.tokens)[0]
                     for s in samples]
        q = ops.row_softmax(ops.mul(ops.concat(log_probs, axis=1),
                                    self.config.mrt_alpha))
        column = np.array(deltas, dtype=np.float64).reshape(-1, 1)
        return ops.matmul(q, Tensor(column))

    def mrt_step(self, batch, reward):
        """Minimum risk update; returns the mean expected risk."""
        if not batch:
            raise ContractViolation('empty batch')
        started = time.time()
        size = self.config.mrt_sample_size
        drawn = []
        for source, reference in batch:
            samples = [self.sample(source, sharpness=1.0)
                       for _ in range(size)]
            deltas = [1.0 - check_reward(reward(source, reference, s))
                      for s in samples]
            drawn.append((source, samples, deltas))
        with Tape() as tape:
            risks = [self.expected_risk(source, samples, deltas)
                     for source, samples, deltas in drawn]
            loss = ops.mean(ops.concat(risks, axis=0))
        tape.backward(loss)
        self._finish_step('mrt-%s' % reward.tag.lower(), self.g_optimizer,
                          loss.item(), started)
        return loss.item()

    def generator_epoch(self, corpus, reward):
        """One pass over the corpus; each minibatch goes to MLE with
        probability ``mle_mix_ratio``, to REINFORCE otherwise."""
        rewards = []
        for batch in self.minibatches(corpus):
            if self.rng.random() < self.config.mle_mix_ratio:
                self.mle_step(batch)
            else:
                rewards.append(self.reinforce_step(batch, reward))
        if rewards:
            return float(np.mean(rewards))
        return None

    def mrt_epoch(self, corpus, reward):
        risks = [self.mrt_step(batch, reward)
                 for batch in self.minibatches(corpus)]
        return float(np.mean(risks))

    def mle_epoch(self, corpus):
        losses = [self.mle_step(batch) for batch in self.minibatches(corpus)]
        return float(np.mean(losses))

    # discriminator updates

    def _require_discriminator(self):
        if self.discriminator is None:
            raise ContractViolation('no discriminator attached')

    def scored_pairs(self, batch):
        """Samples from the frozen generator, scored by CDR against the
        current generator's view of the reference."""
        pairs = []
        for source, reference in batch:
            result = self.sample(source)
            score = cdr_for_pair(self.generator, source, reference, result)
            pairs.append(ScoredPair(source, result.tokens, score.value))
        return pairs

    def discriminator_step(self, batch, mode):
        self._require_discriminator()
        started = time.time()
        disc = self.discriminator
        if mode == 'regression':
            pairs = self.scored_pairs(batch)
            with Tape() as tape:
                loss = disc.regression_loss(pairs)
        elif mode == 'binary':
            generated = [(source, self.sample(source).tokens)
                         for source, _ in batch]
            with Tape() as tape:
                loss = ops.mul(disc.adversarial_objective(list(batch),
                                                          generated), -1.0)
        else:
            raise ContractViolation('unknown discriminator mode %r' % mode)
        tape.backward(loss)
        self._finish_step('disc-%s' % mode, self.d_optimizer, loss.item(),
                          started)
        return loss.item()

    def discriminator_epoch(self, corpus, mode=None):
        mode = mode or self.config.disc_mode
        losses = [self.discriminator_step(batch, mode)
                  for batch in self.minibatches(corpus)]
        return float(np.mean(losses))

    # schedules

    def adversarial_round(self, corpus):
        """``g_steps`` generator epochs against the frozen discriminator,
        then ``d_steps`` discriminator epochs against the frozen
        generator."""
        self._require_discriminator()
        summary = {'generator_reward': [], 'discriminator_loss': []}
        reward = self.reward(DISCRIMINATOR)
        for _ in range(self.config.g_steps):
            summary['generator_reward'].append(
                self.generator_epoch(corpus, reward))
        for _ in range(self.config.d_steps):
            summary['discriminator_loss'].append(
                self.discriminator_epoch(corpus))
        logger.info('adversarial round: %s', summary)
        return summary

    def pretrain(self, corpus, valid=None):
        """MLE until the validation loss plateaus, then discriminator
        pretraining on samples of the frozen generator."""
        cfg = self.config
        valid = list(valid or corpus)
        best, best_params, stale = None, None, 0
        epochs = 0
        for epoch in range(cfg.pretrain_max_epochs):
            train_loss = self.mle_epoch(corpus)
            valid_nll = self.generator.nll_per_token(valid)
            epochs = epoch + 1
            logger.info('pretrain epoch %d: train loss %.4f, valid '
                        'nll/token %.4f', epochs, train_loss, valid_nll)
            if best is None or valid_nll < best:
                best, best_params, stale = valid_nll, \
                    self.generator.params.copy(), 0
            else:
                stale += 1
                if stale >= cfg.patience:
                    break
        if best_params is not None:
            self.generator.params.load_values(best_params)

        disc_losses = []
        if self.discriminator is not None:
            for _ in range(cfg.disc_pretrain_epochs):
                disc_losses.append(self.discriminator_epoch(corpus))
        return {'epochs': epochs, 'valid_nll': best,
                'discriminator_loss': disc_losses}