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
""" Experiment configuration.

Read either from an ini file (sections ``[train]``, ``[corpus]``,
``[model]`` and ``[discriminator]``; the logging sections are left to
``logging.config.fileConfig``) or from a JSON document with the same
four objects. Keys are the field names of the matching config classes.
"""
import os
import re
from configparser import ConfigParser, Error as ConfigParserError
from dataclasses import dataclass, field, fields

from adequacy.corpus import SyntheticTaskSpec
from adequacy.discriminator import Discriminator, DiscriminatorConfig
from adequacy.errors import ConfigError
from adequacy.generator import Generator, GeneratorConfig
from adequacy.training import TrainConfig
from adequacy.util import read_json

SECTIONS = ('train', 'corpus', 'model', 'discriminator')
# vocabulary sizes come from the corpus, never from the config
_DERIVED = ('src_vocab_size', 'tgt_vocab_size')

_IS_INT = re.compile(r'^-?\d+$')


def convert(value):
    """Turns an ini string into a bool, int, float, list or string."""
    value = value.strip()
    if '\n' in value:
        return [convert(line) for line in value.split('\n') if line.strip()]
    lowered = value.lower()
    if lowered in ('true', 'false'):
        return lowered == 'true'
    if _IS_INT.match(value):
        return int(value)
    try:
        return float(value)
    except ValueError:
        return value


def _coerce(cls, section, values):
    known = dict((f.name, f) for f in fields(cls))
    result = {}
    for key, value in values.items():
        if key not in known or key in _DERIVED:
            raise ConfigError('unknown option %r in [%s]' % (key, section))
        expected = known[key].type
        if expected is float and isinstance(value, int) \
                and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, expected) or (
                expected is int and isinstance(value, bool)):
            raise ConfigError('[%s] %s must be %s, got %r'
                              % (section, key, expected.__name__, value))
        result[key] = value
    return result


@dataclass
class ExperimentConfig:
    train: TrainConfig = field(default_factory=TrainConfig)
    corpus: SyntheticTaskSpec = field(default_factory=SyntheticTaskSpec)
    model: dict = field(default_factory=dict)
    discriminator: dict = field(default_factory=dict)

    @classmethod
    def from_sections(cls, sections):
        unknown = set(sections) - set(SECTIONS)
        if unknown:
            raise ConfigError('unknown section(s): %s'
                              % ', '.join(sorted(unknown)))
        train = TrainConfig(**_coerce(TrainConfig, 'train',
                                      sections.get('train', {})))
        corpus = SyntheticTaskSpec(**_coerce(SyntheticTaskSpec, 'corpus',
                                             sections.get('corpus', {})))
        model = _coerce(GeneratorConfig, 'model', sections.get('model', {}))
        disc = _coerce(DiscriminatorConfig, 'discriminator',
                       sections.get('discriminator', {}))
        train.validate()
        corpus.validate()
        return cls(train, corpus, model, disc)

    def build_generator(self, src_vocab, tgt_vocab):
        return Generator(GeneratorConfig(len(src_vocab), len(tgt_vocab),
                                         **self.model))

    def build_discriminator(self, src_vocab, tgt_vocab):
        return Discriminator(DiscriminatorConfig(len(src_vocab),
                                                 len(tgt_vocab),
                                                 **self.discriminator))

    def to_dict(self):
        return {'train': self.train.to_dict(),
                'corpus': self.corpus.to_dict(),
                'model': dict(self.model),
                'discriminator': dict(self.discriminator)}


def _read_ini(path):
    parser = ConfigParser(defaults={'here': os.path.dirname(
        os.path.abspath(path))})
    try:
        if not parser.read(path):
            raise ConfigError('cannot read %s' % path)
    except ConfigParserError as e:
        raise ConfigError('%s: %s' % (path, e))
    defaults = set(parser.defaults())
    sections = {}
    for name in SECTIONS:
        if not parser.has_section(name):
            continue
        sections[name] = dict((key, convert(value))
                              for key, value in parser.items(name)
                              if key not in defaults)
    return sections


def load_config(path=None):
    """Returns an ExperimentConfig; defaults everywhere when ``path`` is
    None."""
    if path is None:
        return ExperimentConfig()
    if path.endswith('.json'):
        try:
            sections = read_json(path)
        except (IOError, ValueError) as e:
            raise ConfigError('cannot read %s: %s' % (path, e))
        if not isinstance(sections, dict):
            raise ConfigError('%s must hold a JSON object' % path)
    else:
        sections = _read_ini(path)
    return ExperimentConfig.from_sections(sections)
