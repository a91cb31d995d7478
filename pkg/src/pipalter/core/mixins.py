"""Mixins giving pipalter's solvers and result containers readable echo
and print representations.

Result containers hold arrays with one entry per item, per nonzero or per
trial. Printing them in full buries the few scalars a user cares about, so
both mixins summarize arrays and sparse matrices above a small size by
their type and shape.
"""

import dataclasses
import inspect
import pprint
import reprlib
from typing import Any, Dict

import numpy as np

# arrays with more elements than this print as a shape summary
SUMMARY_SIZE = 8


def _summary(value: Any) -> Any:
    """Returns value or a short description of it if it is a large array."""

    if isinstance(value, np.ndarray) and value.size > SUMMARY_SIZE:
        return '{} array of shape {}'.format(value.dtype, value.shape)
    if hasattr(value, 'nnz') and hasattr(value, 'shape'):
        return 'sparse {} matrix with {} nonzeros'.format(value.shape,
                                                          value.nnz)
    return value


def _public_state(obj: Any) -> Dict[str, Any]:
    """Returns the summarized non-protected attributes of obj.

    Dataclass fields are listed in declaration order; other objects
    contribute their instance dict or their slots.
    """

    if dataclasses.is_dataclass(obj):
        names = [f.name for f in dataclasses.fields(obj)]
    elif hasattr(obj, '__dict__'):
        names = list(vars(obj))
    else:
        names = list(getattr(obj, '__slots__', ()))

    return {name: _summary(getattr(obj, name)) for name in names
            if not name.startswith('_')}


def _printout(obj: Any, state: Dict[str, Any]) -> str:
    """Builds the multi-line print representation shared by the mixins."""

    cls_name = type(obj).__name__
    pp = pprint.PrettyPrinter(sort_dicts=False, compact=True)
    return '\n'.join([cls_name + ' Object',
                      pp.pformat(state),
                      'Type help({}) for full documentation'.format(cls_name)])


class ViewInstance:
    """Mixin for stateful workers like the simplex solver and trial batchers.

    The echo representation is the class name with its initializer's
    signature. The print representation lists public attributes followed
    by public properties.
    """

    __slots__ = ()

    def __repr__(self):
        """Returns the __init__'s signature as the echo representation."""

        signature = inspect.signature(self.__init__)
        return '{}{}'.format(type(self).__name__, signature)

    def __str__(self):
        """Returns this instance's attributes and properties."""

        state = _public_state(self)
        props = inspect.getmembers(type(self),
                                   lambda item: isinstance(item, property))
        state.update({name: _summary(getattr(self, name))
                      for name, _ in props if not name.startswith('_')})
        return _printout(self, state)


class ViewContainer:
    """Mixin for frozen result records such as instances, solutions and
    reports.

    The echo representation is a one line reprlib rendering of the
    summarized fields.
    """

    __slots__ = ()

    def __repr__(self):
        """Returns a one line summary of this container's fields."""

        r = reprlib.Repr()
        r.maxdict = 4
        r.maxstring = 60
        return '{}: {}'.format(type(self).__name__,
                               r.repr(_public_state(self)))

    def __str__(self):
        """Returns this container's fields one per line."""

        return _printout(self, _public_state(self))
