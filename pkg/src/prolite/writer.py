"""Canonical term printing: the bit-exact format used in transcripts.

Operators render with the reader's table, lists as [a,b|T], rationals as
N rdiv D.  parse(print(t)) is a variant of t for default-table terms.
"""

from __future__ import annotations

from fractions import Fraction

from .reader import DEFAULT_OPS
from .terms import Atom, Struct, Var

_UNQUOTED_SYMBOLIC = set("#$&*+-./:<=>?@^~\\")


def _atom_text(name):
    if name == "" or name in ("[]", "{}", "!", ";", ","):
        return name if name else "''"
    if name[0].islower() and all(c == "_" or c.isalnum() for c in name):
        return name
    if all(c in _UNQUOTED_SYMBOLIC for c in name):
        return name
    escaped = name.replace("\\", "\\\\").replace("'", "\\'")
    escaped = escaped.replace("\n", "\\n").replace("\t", "\\t")
    return f"'{escaped}'"


def term_to_text(t, ops=DEFAULT_OPS, bindings=None):
    return _write(t, 1200, ops, bindings)


def _write(t, max_prio, ops, b):
    if b is not None:
        t = b.deref(t)
    if isinstance(t, Var):
        return f"_G{t.id}"
    if isinstance(t, bool):
        return "true" if t else "fail"
    if isinstance(t, int):
        return _maybe_paren(str(t), 200 if t < 0 else 0, max_prio)
    if isinstance(t, Fraction):
        text = f"{t.numerator} rdiv {t.denominator}"
        return _maybe_paren(text, 400, max_prio)
    if isinstance(t, float):
        return _maybe_paren(repr(t), 200 if t < 0 else 0, max_prio)
    if isinstance(t, Atom):
        return _atom_text(t.name)
    if isinstance(t, Struct):
        if t.name == "." and len(t.args) == 2:
            return _write_list(t, ops, b)
        if t.name == "{}" and len(t.args) == 1:
            return "{" + _write(t.args[0], 1200, ops, b) + "}"
        if len(t.args) == 2 and t.name in ops.infix:
            prio, typ = ops.infix[t.name]
            lmax = prio if typ == "yfx" else prio - 1
            rmax = prio if typ == "xfy" else prio - 1
            sep = f" {t.name} " if t.name != "," else ", "
            text = _write(t.args[0], lmax, ops, b) + sep \
                + _write(t.args[1], rmax, ops, b)
            return _maybe_paren(text, prio, max_prio)
        if len(t.args) == 1 and t.name in ops.prefix:
            prio, typ = ops.prefix[t.name]
            amax = prio if typ == "fy" else prio - 1
            arg = _write(t.args[0], amax, ops, b)
            space = " " if (arg[0].isalnum() or arg[0] in "_-" or
                            t.name[-1] in _UNQUOTED_SYMBOLIC and
                            arg[0] in _UNQUOTED_SYMBOLIC or
                            t.name[-1].isalnum()) else ""
            return _maybe_paren(f"{_atom_text(t.name)}{space}{arg}", prio, max_prio)
        args = ", ".join(_write(a, 999, ops, b) for a in t.args)
        return f"{_atom_text(t.name)}({args})"
    raise TypeError(f"unprintable term {t!r}")


def _maybe_paren(text, prio, max_prio):
    return f"({text})" if prio > max_prio else text


def _write_list(t, ops, b):
    parts = []
    while True:
        parts.append(_write(t.args[0], 999, ops, b))
        tail = t.args[1]
        if b is not None:
            tail = b.deref(tail)
        if isinstance(tail, Struct) and tail.name == "." and len(tail.args) == 2:
            t = tail
            continue
        if tail is Atom("[]"):
            return "[" + ", ".join(parts) + "]"
        return "[" + ", ".join(parts) + "|" + _write(tail, 999, ops, b) + "]"
