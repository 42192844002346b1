# ----------------------------------------------------------------------------
# Copyright (c) 2024-, LieProfile development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import json


class LieProfileObject(object):
    """Base class for any immutable, serializable lieprofile object

    Subclasses define `_kind`, the tag written in their JSON description,
    and `_key`, the tuple of values that identifies an instance.

    Methods
    -------
    to_dict
    to_json
    factory

    Raises
    ------
    ValueError
        If `factory` receives an unknown kind
    """
    _kind = None
    _registry = {}

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        if cls._kind is not None:
            LieProfileObject._registry[cls._kind] = cls

    @property
    def kind(self):
        return self._kind

    def _key(self):
        raise NotImplementedError()

    def __eq__(self, other):
        if type(self) != type(other):
            return False
        return self._key() == other._key()

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def __repr__(self):
        return '%s(%s)' % (type(self).__name__, self.to_json())

    def to_dict(self):
        """The JSON-compatible description of the object

        Returns
        -------
        dict
        """
        raise NotImplementedError()

    def to_json(self):
        """The canonical JSON text of `to_dict`"""
        return json.dumps(self.to_dict(), sort_keys=True)

    @staticmethod
    def factory(description):
        """Builds an object from its JSON description

        Parameters
        ----------
        description : dict
            A description with a `kind` entry naming a registered subclass

        Returns
        -------
        LieProfileObject
            Instance of the subclass registered under that kind
        """
        kind = description.get('kind')
        try:
            cls = LieProfileObject._registry[kind]
        except KeyError:
            raise ValueError('Unknown object kind: %s. Known kinds: %s'
                             % (kind, ', '.join(
                                 sorted(LieProfileObject._registry))))
        return cls.from_dict(description)
