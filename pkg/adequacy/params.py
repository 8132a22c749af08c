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
""" Named parameter tensors.
"""
from collections import OrderedDict
from hashlib import md5

import numpy as np

from adequacy.autodiff import Tensor
from adequacy.errors import CheckpointError, ContractViolation


class ParamSet(object):
    """Ordered mapping of names to trainable tensors.

    Models register their weights under dotted names (``enc_fwd.W_z``),
    which is also how they appear in checkpoints.
    """
    def __init__(self):
        self._tensors = OrderedDict()

    def __getitem__(self, name):
        return self._tensors[name]

    def __contains__(self, name):
        return name in self._tensors

    def __iter__(self):
        return iter(self._tensors)

    def __len__(self):
        return len(self._tensors)

    def items(self):
        return self._tensors.items()

    def tensors(self):
        return list(self._tensors.values())

    def add(self, name, values):
        if name in self._tensors:
            raise ContractViolation('parameter %r already registered' % name)
        tensor = Tensor(values, requires_grad=True, name=name)
        self._tensors[name] = tensor
        return tensor

    def uniform(self, name, shape, rng, scale):
        return self.add(name, rng.uniform(-scale, scale, size=shape))

    def zeros(self, name, shape):
        return self.add(name, np.zeros(shape))

    def expect(self, name, shape):
        """Checks a loaded parameter exists with the given shape."""
        if name not in self._tensors:
            raise CheckpointError('missing parameter %r' % name)
        found = self._tensors[name].shape
        if found != tuple(shape):
            raise CheckpointError('parameter %r has shape %s, expected %s'
                                  % (name, found, tuple(shape)))
        return self._tensors[name]

    def zero_grad(self):
        for tensor in self._tensors.values():
            tensor.zero_grad()

    def grad_norm(self):
        total = 0.0
        for tensor in self._tensors.values():
            if tensor.grad is not None:
                total += float(np.sum(tensor.grad * tensor.grad))
        return total ** 0.5

    def fingerprint(self):
        """Digest of every value, to check that a frozen set is untouched."""
        digest = md5()
        for name, tensor in self._tensors.items():
            digest.update(name.encode('utf-8'))
            digest.update(tensor.values.tobytes())
        return digest.hexdigest()

    def copy(self):
        clone = ParamSet()
        for name, tensor in self._tensors.items():
            clone.add(name, tensor.values.copy())
        return clone

    def load_values(self, other):
        """Overwrites values in place from another set with the same
        layout."""
        for name, tensor in self._tensors.items():
            source = other.expect(name, tensor.shape)
            tensor.values[...] = source.values

    def to_dict(self):
        return OrderedDict(
            (name, {'shape': list(tensor.shape),
                    'values': tensor.values.reshape(-1).tolist()})
            for name, tensor in self._tensors.items())

    @classmethod
    def from_dict(cls, data):
        params = cls()
        for name, entry in data.items():
            try:
                shape = tuple(entry['shape'])
                values = np.array(entry['values'], dtype=np.float64)
            except (KeyError, TypeError, ValueError):
                raise CheckpointError('malformed tensor entry %r' % name)
            if values.size != int(np.prod(shape)):
                raise CheckpointError('tensor %r has %d values for shape %s'
                                      % (name, values.size, shape))
            params.add(name, values.reshape(shape))
        return params
