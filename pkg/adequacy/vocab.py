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
""" Token <-> index mapping.
"""
import io

from adequacy.errors import ContractViolation

PAD, BOS, EOS, UNK = 0, 1, 2, 3
RESERVED = ('<pad>', '<s>', '</s>', '<unk>')


def strip_eos(tokens):
    """Drops everything from the first EOS on."""
    tokens = list(tokens)
    if EOS in tokens:
        return tokens[:tokens.index(EOS)]
    return tokens


class Vocabulary(object):
    """Reserved tokens occupy indices 0-3, content tokens follow."""

    def __init__(self, tokens=()):
        self._tokens = list(RESERVED)
        self._index = dict((tok, i) for i, tok in enumerate(self._tokens))
        for token in tokens:
            self.add(token)

    def add(self, token):
        if not token or any(char.isspace() for char in token):
            raise ContractViolation('invalid token %r' % token)
        if token in self._index:
            if token in RESERVED:
                raise ContractViolation('%r is reserved' % token)
            return self._index[token]
        self._index[token] = len(self._tokens)
        self._tokens.append(token)
        return self._index[token]

    def __len__(self):
        return len(self._tokens)

    def __contains__(self, token):
        return token in self._index

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and self._tokens == other._tokens

    def __ne__(self, other):
        return not self == other

    def content_tokens(self):
        return self._tokens[len(RESERVED):]

    def index(self, token):
        return self._index.get(token, UNK)

    def token(self, index):
        if not 0 <= index < len(self._tokens):
            raise ContractViolation('index %d out of vocabulary of size %d'
                                    % (index, len(self._tokens)))
        return self._tokens[index]

    def encode(self, words, add_eos=False):
        if isinstance(words, str):
            words = words.split()
        ids = [self.index(word) for word in words]
        if add_eos:
            ids.append(EOS)
        return ids

    def decode(self, ids, keep_eos=False):
        if not keep_eos:
            ids = strip_eos(ids)
        return [self.token(i) for i in ids]

    def render(self, ids):
        """Space-joined surface string, EOS and what follows dropped."""
        return ' '.join(self.decode(ids))

    def write(self, path):
        with io.open(path, 'w', encoding='utf-8', newline='\n') as f:
            for token in self.content_tokens():
                f.write(token + '\n')

    @classmethod
    def read(cls, path):
        with io.open(path, encoding='utf-8') as f:
            return cls(line.strip() for line in f if line.strip())
