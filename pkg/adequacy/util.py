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
""" Various helpers.
"""
import io
import json
import os
import time

from adequacy.errors import CheckpointError, ContractViolation

CHECKPOINT_FORMAT = 1


def json_dumps(data):
    """Deterministic JSON: sorted keys, shortest round-trip floats."""
    return json.dumps(data, sort_keys=True, allow_nan=False)


def write_json(path, data):
    with io.open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(json_dumps(data))
        f.write('\n')


def read_json(path):
    with io.open(path, encoding='utf-8') as f:
        return json.load(f)


def parse_positions(text):
    """'0,1,2' -> [0, 1, 2]"""
    text = text.strip()
    if not text:
        return []
    try:
        positions = [int(part) for part in text.split(',')]
    except ValueError:
        raise ContractViolation('positions must be comma-separated '
                                'integers, got %r' % text)
    if any(p < 0 for p in positions):
        raise ContractViolation('negative position in %r' % text)
    return positions


def save_checkpoint(path, generator, discriminator=None, extra=None):
    """Writes the models as one JSON document.

    Tensors are stored as ``{shape, values}`` with floats in shortest
    round-trip form, so reloading is bit-exact.
    """
    data = {'format': CHECKPOINT_FORMAT,
            'generator': generator.to_dict()}
    if discriminator is not None:
        data['discriminator'] = discriminator.to_dict()
    if extra:
        data['config'] = extra
    directory = os.path.dirname(path)
    if directory and not os.path.isdir(directory):
        os.makedirs(directory)
    write_json(path, data)


def load_checkpoint(path):
    """Returns ``(generator, discriminator or None, extra config)``."""
    from adequacy.generator import Generator
    from adequacy.discriminator import Discriminator
    try:
        data = read_json(path)
    except (IOError, ValueError) as e:
        raise CheckpointError('cannot read checkpoint %s: %s' % (path, e))
    if data.get('format') != CHECKPOINT_FORMAT:
        raise CheckpointError('unsupported checkpoint format %r'
                              % data.get('format'))
    try:
        generator = Generator.from_dict(data['generator'])
        discriminator = None
        if 'discriminator' in data:
            discriminator = Discriminator.from_dict(data['discriminator'])
    except (KeyError, TypeError) as e:
        raise CheckpointError('malformed checkpoint %s: %s' % (path, e))
    return generator, discriminator, data.get('config', {})


class TrainingLog(object):
    """JSON-lines record of the training steps.

    Each line holds ``step, mode, mean_reward, loss, grad_norm, wall_ms``.
    """
    def __init__(self, path=None, stream=None):
        self.path = path
        self._stream = stream
        if path is not None:
            self._stream = io.open(path, 'a', encoding='utf-8', newline='\n')

    def write(self, step, mode, loss, grad_norm, started, mean_reward=None):
        entry = {'step': step, 'mode': mode, 'mean_reward': mean_reward,
                 'loss': loss, 'grad_norm': grad_norm,
                 'wall_ms': round((time.time() - started) * 1000.0, 3)}
        if self._stream is not None:
            self._stream.write(json_dumps(entry) + '\n')
            self._stream.flush()
        return entry

    def close(self):
        if self.path is not None and self._stream is not None:
            self._stream.close()
            self._stream = None
