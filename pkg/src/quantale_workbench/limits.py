"""Size caps.

Two limits are derived from one configurable number ``cap`` (default 16):

* user-supplied lattices and explicitly requested powers (free modules,
  products) may have at most ``cap`` elements;
* derived structures (hom lattices, endomorphism quantales, tensor products)
  and the pair universe ``M x N`` of a tensor may have at most ``cap**2``.

The active cap lives in a context variable so that concurrent callers can use
different caps without interfering.
"""

from __future__ import annotations

import contextvars
from contextlib import contextmanager

from .errors import SizeCapExceeded

DEFAULT_CAP = 16

_cap: contextvars.ContextVar[int] = contextvars.ContextVar("quantale_workbench_cap", default=DEFAULT_CAP)


def current_cap() -> int:
    return _cap.get()


def derived_cap() -> int:
    return _cap.get() ** 2


@contextmanager
def size_cap(n: int):
    if n < 1:
        raise ValueError("cap must be positive")
    token = _cap.set(n)
    try:
        yield n
    finally:
        _cap.reset(token)


def check_size(size: int, what: str, *, derived: bool = False) -> None:
    limit = derived_cap() if derived else current_cap()
    if size > limit:
        raise SizeCapExceeded(f"{what} has {size} elements, cap is {limit}")
