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
import os
import shutil
import tempfile
import unittest

import numpy as np

from adequacy.errors import CheckpointError, ConfigError, ContractViolation
from adequacy.generator import Generator
from adequacy.optim import SGD, Adam, clip_scale, make_optimizer
from adequacy.params import ParamSet
from adequacy.util import (json_dumps, load_checkpoint, parse_positions,
                           save_checkpoint)
from adequacy.vocab import EOS, UNK, Vocabulary, strip_eos
from adequacy.tests.support import tiny_discriminator, tiny_generator


class TestCheckpoint(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.path = os.path.join(self.tmp, 'nested', 'model.json')

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def _write(self, text):
        with open(self.path, 'w') as f:
            f.write(text)

    def test_round_trip(self):
        gen = tiny_generator(init_scale=0.7)
        disc = tiny_discriminator(cell='lstm')
        save_checkpoint(self.path, gen, disc, {'train': {'seed': 3}})
        loaded, loaded_disc, extra = load_checkpoint(self.path)
        self.assertEqual(extra, {'train': {'seed': 3}})
        for name, tensor in gen.params.items():
            np.testing.assert_array_equal(loaded.params[name].values,
                                          tensor.values)
        self.assertEqual(loaded_disc.params.fingerprint(),
                         disc.params.fingerprint())
        self.assertEqual(loaded.greedy_decode([4, 5], 5).tokens,
                         gen.greedy_decode([4, 5], 5).tokens)
        self.assertEqual(loaded.config, gen.config)

    def test_bad_files(self):
        self.assertRaises(CheckpointError, load_checkpoint, self.path)
        save_checkpoint(self.path, tiny_generator())
        self._write('{"format": 2}')
        self.assertRaises(CheckpointError, load_checkpoint, self.path)
        self._write('{"format": 1}')
        self.assertRaises(CheckpointError, load_checkpoint, self.path)
        self._write('not json')
        self.assertRaises(CheckpointError, load_checkpoint, self.path)

    def test_shape_mismatch(self):
        data = tiny_generator().to_dict()
        data['config']['hidden_dim'] = 5
        self.assertRaises(CheckpointError, Generator.from_dict, data)

    def test_deterministic_json(self):
        self.assertEqual(json_dumps({'b': 0.1, 'a': [1, 2]}),
                         '{"a": [1, 2], "b": 0.1}')
        self.assertRaises(ValueError, json_dumps, {'a': float('nan')})


class TestParamSet(unittest.TestCase):

    def test_registry(self):
        params = ParamSet()
        params.zeros('w', (2, 3))
        self.assertRaises(ContractViolation, params.zeros, 'w', (1,))
        self.assertRaises(CheckpointError, params.expect, 'w', (3, 2))
        self.assertRaises(CheckpointError, params.expect, 'v', (1,))
        self.assertEqual(list(params), ['w'])

    def test_copy_and_load(self):
        params = ParamSet()
        params.uniform('w', (2, 2), np.random.default_rng(0), 1.0)
        snapshot = params.copy()
        before = params.fingerprint()
        params['w'].values += 1.0
        self.assertNotEqual(params.fingerprint(), before)
        params.load_values(snapshot)
        self.assertEqual(params.fingerprint(), before)

    def test_malformed_entries(self):
        self.assertRaises(CheckpointError, ParamSet.from_dict,
                          {'w': {'shape': [2], 'values': [1.0]}})
        self.assertRaises(CheckpointError, ParamSet.from_dict,
                          {'w': {'values': [1.0]}})


class TestOptimizers(unittest.TestCase):

    def _params(self, grad):
        params = ParamSet()
        tensor = params.zeros('w', (1, 2))
        tensor.grad = np.array([grad], dtype=np.float64)
        return params

    def test_clip_scale(self):
        self.assertEqual(clip_scale(3.0, 5.0), 1.0)
        self.assertEqual(clip_scale(10.0, 5.0), 0.5)
        self.assertEqual(clip_scale(0.0, 5.0), 1.0)
        self.assertEqual(clip_scale(10.0, None), 1.0)

    def test_sgd_clipping(self):
        params = self._params([3.0, 4.0])
        norm = SGD(params, 1.0, clip_norm=1.0).step()
        self.assertEqual(norm, 5.0)
        np.testing.assert_allclose(params['w'].values, [[-0.6, -0.8]],
                                   rtol=1e-12)
        self.assertIsNone(params['w'].grad)

    def test_sgd_below_threshold(self):
        params = self._params([0.3, -0.4])
        SGD(params, 0.5).step()
        np.testing.assert_array_equal(params['w'].values, [[-0.15, 0.2]])

    def test_zero_gradient(self):
        for klass in (SGD, Adam):
            params = self._params([0.0, 0.0])
            before = params.fingerprint()
            self.assertEqual(klass(params, 0.1).step(), 0.0)
            self.assertEqual(params.fingerprint(), before)

    def test_adam_first_step(self):
        params = self._params([2.0, -0.5])
        Adam(params, 0.01).step()
        np.testing.assert_allclose(params['w'].values, [[-0.01, 0.01]],
                                   rtol=1e-6)

    def test_factory(self):
        params = self._params([1.0, 1.0])
        self.assertIsInstance(make_optimizer('adam', params, 0.1), Adam)
        self.assertRaises(ConfigError, make_optimizer, 'rmsprop', params, 0.1)
        self.assertRaises(ConfigError, SGD, params, 0.0)


class TestVocabulary(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_encode_decode(self):
        vocab = Vocabulary(['a', 'b'])
        self.assertEqual(len(vocab), 6)
        self.assertEqual(vocab.encode('a b z', add_eos=True), [4, 5, UNK, EOS])
        self.assertEqual(vocab.render([5, 4, EOS, 4]), 'b a')
        self.assertEqual(vocab.decode([4, EOS], keep_eos=True), ['a', '</s>'])
        self.assertEqual(vocab.add('a'), 4)
        self.assertRaises(ContractViolation, vocab.token, 6)
        self.assertRaises(ContractViolation, vocab.add, 'two words')
        self.assertRaises(ContractViolation, vocab.add, '</s>')

    def test_strip_eos(self):
        self.assertEqual(strip_eos([4, 5, EOS, 6]), [4, 5])
        self.assertEqual(strip_eos([4, 5]), [4, 5])

    def test_file_round_trip(self):
        path = os.path.join(self.tmp, 'vocab.src')
        vocab = Vocabulary(['x', 'y', 'z'])
        vocab.write(path)
        self.assertEqual(Vocabulary.read(path), vocab)

    def test_positions(self):
        self.assertEqual(parse_positions('0, 3,1'), [0, 3, 1])
        self.assertEqual(parse_positions(' '), [])
        self.assertRaises(ContractViolation, parse_positions, '1,x')
        self.assertRaises(ContractViolation, parse_positions, '-1')
