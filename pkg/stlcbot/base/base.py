"""
STLcBOT base class.
"""

import copy


class STLcBOTBase(object):
    """
    Base object for STLcBOT.
    """

    def copy(self):
        return copy.deepcopy(self)

    def todict(self):
        return {}
