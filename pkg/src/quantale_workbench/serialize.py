"""JSON reading and writing for lattices, quantales, modules, homs, tensors and certificates.

Every document is an object with a ``kind`` field.  Elements are referred to
by name.  Quantales referenced from modules may be catalog names or inline
documents.  Output is always self-contained (rings are written inline) so that
``parse(dump(x)) == x``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Callable

from .errors import ParseError, ValidationError
from .lattice import SupLattice, validate_suplattice
from .qmodule import Hom, Module, checked_hom, free_module, regular, validate_bimodule, validate_module
from .quantale import Quantale, QuantaleIso, powerset_quantale, validate_quantale

SCHEMA_VERSION = 1


class _Names:
    """Name index for a plain set (the monoid of a powerset quantale)."""

    def __init__(self, names):
        self.names = tuple(names)
        self._pos = {n: i for i, n in enumerate(self.names)}

    def index(self, name: str) -> int:
        return self._pos[name]


class _Doc:
    """Parsing context: keeps the raw text so unknown names can be located."""

    def __init__(self, text: str | None = None):
        self.text = text

    def where(self, name: str) -> tuple[int | None, int | None]:
        if not self.text:
            return None, None
        pos = self.text.find(json.dumps(name))
        if pos < 0:
            return None, None
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def fail(self, message: str, name: str | None = None) -> ParseError:
        line, col = self.where(name) if name is not None else (None, None)
        return ParseError(message, line, col)

    def lookup(self, lat: SupLattice | _Names, name: Any, what: str) -> int:
        if not isinstance(name, str):
            raise self.fail(f"{what}: element names must be strings, got {name!r}")
        try:
            return lat.index(name)
        except KeyError:
            raise self.fail(f"{what}: unknown element {name!r}", name) from None

    def field(self, obj: dict, key: str, what: str):
        if not isinstance(obj, dict):
            raise self.fail(f"{what}: expected an object")
        if key not in obj:
            raise self.fail(f"{what}: missing field {key!r}")
        return obj[key]


# -- reading ---------------------------------------------------------------------------------


def _lattice(doc: _Doc, obj: dict) -> SupLattice:
    elements = doc.field(obj, "elements", "lattice")
    if not isinstance(elements, list) or not all(isinstance(e, str) for e in elements):
        raise doc.fail("lattice: 'elements' must be a list of strings")
    known = set(elements)
    for key in ("leq", "join"):
        for row in obj.get(key) or ():
            for name in row:
                if name not in known:
                    raise doc.fail(f"lattice {key}: unknown element {name!r}", name)
    leq = obj.get("leq")
    join = obj.get("join")
    return validate_suplattice(
        elements,
        leq=[tuple(p) for p in leq] if leq is not None else None,
        join=[tuple(t) for t in join] if join is not None else None,
    )


def _triples(doc: _Doc, rows, A, B, C, what: str) -> dict:
    out = {}
    if not isinstance(rows, list):
        raise doc.fail(f"{what}: expected a list of triples")
    for row in rows:
        if not isinstance(row, list) or len(row) != 3:
            raise doc.fail(f"{what}: entries must be triples, got {row!r}")
        a, b, c = row
        out[doc.lookup(A, a, what), doc.lookup(B, b, what)] = doc.lookup(C, c, what)
    return out


def _total(doc: _Doc, cells: dict, n: int, m: int, names_a, names_b, what: str) -> list[list[int]]:
    table = []
    for a in range(n):
        row = []
        for b in range(m):
            if (a, b) not in cells:
                raise doc.fail(f"{what}: no entry for ({names_a[a]}, {names_b[b]})")
            row.append(cells[a, b])
        table.append(row)
    return table


def _quantale(doc: _Doc, obj: dict, resolve: Callable[[str], Any]) -> Quantale:
    if "powerset_of" in obj:
        spec = obj["powerset_of"]
        elems = doc.field(spec, "set", "powerset_of")
        if not isinstance(elems, list) or len(set(elems)) != len(elems):
            raise doc.fail("powerset_of: 'set' must list distinct names")
        mon = _Names(elems)
        cells = _triples(doc, doc.field(spec, "mul", "powerset_of"), mon, mon, mon, "monoid mul")
        table = _total(doc, cells, len(elems), len(elems), elems, elems, "monoid mul")
        unit = doc.lookup(mon, doc.field(spec, "unit", "powerset_of"), "monoid unit")
        return powerset_quantale(elems, table, unit)
    lat = _lattice(doc, doc.field(obj, "lattice", "quantale"))
    cells = _triples(doc, doc.field(obj, "mul", "quantale"), lat, lat, lat, "mul")
    table = _total(doc, cells, lat.size, lat.size, lat.names, lat.names, "mul")
    unit = doc.lookup(lat, doc.field(obj, "unit", "quantale"), "unit")
    return validate_quantale(lat, table, unit)


def _ring(doc: _Doc, ref, resolve: Callable[[str], Any]) -> Quantale:
    if isinstance(ref, str):
        Q = resolve(ref)
    elif isinstance(ref, dict):
        Q = _dispatch(doc, ref, resolve)
    else:
        raise doc.fail(f"ring reference must be a name or an object, got {ref!r}")
    if not isinstance(Q, Quantale):
        raise doc.fail(f"ring reference {ref!r} is not a quantale", ref if isinstance(ref, str) else None)
    return Q


def _action(doc: _Doc, rows, ring: Quantale, lat: SupLattice, side: str, what: str) -> list[list[int]]:
    if side == "left":
        cells = _triples(doc, rows, ring.lat, lat, lat, what)
        return _total(doc, cells, ring.size, lat.size, ring.names, lat.names, what)
    cells = _triples(doc, rows, lat, ring.lat, lat, what)
    flipped = {(a, u): v for (u, a), v in cells.items()}
    return _total(doc, flipped, ring.size, lat.size, ring.names, lat.names, what)


def _module(doc: _Doc, obj: dict, resolve: Callable[[str], Any]) -> Module:
    if "free" in obj:
        spec = obj["free"]
        Q = _ring(doc, doc.field(spec, "ring", "free"), resolve)
        rank = doc.field(spec, "rank", "free")
        if not isinstance(rank, int) or rank < 0:
            raise doc.fail("free: rank must be a non-negative integer")
        return free_module(Q, rank)[0]
    if "regular" in obj:
        spec = obj["regular"]
        Q = _ring(doc, doc.field(spec, "ring", "regular"), resolve)
        return regular(Q, spec.get("side", "left"))
    Q = _ring(doc, doc.field(obj, "ring", "module"), resolve)
    side = obj.get("side", "left")
    if side not in ("left", "right"):
        raise doc.fail(f"module: side must be 'left' or 'right', got {side!r}")
    lat = _lattice(doc, doc.field(obj, "lattice", "module"))
    table = _action(doc, doc.field(obj, "act", "module"), Q, lat, side, "act")
    return validate_module(Q, lat, table, side)


def _bimodule(doc: _Doc, obj: dict, resolve: Callable[[str], Any]) -> Module:
    if "regular" in obj:
        return regular(_ring(doc, obj["regular"], resolve), "both")
    if "both_sides_of" in obj:
        M = _dispatch_ref(doc, obj["both_sides_of"], resolve)
        if not isinstance(M, Module):
            raise doc.fail("both_sides_of must name a module")
        return M.as_bimodule()
    S = _ring(doc, doc.field(obj, "left_ring", "bimodule"), resolve)
    R = _ring(doc, doc.field(obj, "right_ring", "bimodule"), resolve)
    lat = _lattice(doc, doc.field(obj, "lattice", "bimodule"))
    lt = _action(doc, doc.field(obj, "lact", "bimodule"), S, lat, "left", "lact")
    rt = _action(doc, doc.field(obj, "ract", "bimodule"), R, lat, "right", "ract")
    return validate_bimodule(S, R, lat, lt, rt)


def _dispatch_ref(doc: _Doc, ref, resolve):
    if isinstance(ref, str):
        return resolve(ref)
    return _dispatch(doc, ref, resolve)


def _hom(doc: _Doc, obj: dict, resolve) -> Hom:
    src = _dispatch_ref(doc, doc.field(obj, "src", "hom"), resolve)
    dst = _dispatch_ref(doc, doc.field(obj, "dst", "hom"), resolve)
    if not isinstance(src, Module) or not isinstance(dst, Module):
        raise doc.fail("hom: src and dst must be modules")
    pairs = doc.field(obj, "map", "hom")
    table: dict[int, int] = {}
    for row in pairs:
        if not isinstance(row, list) or len(row) != 2:
            raise doc.fail(f"hom map entries must be pairs, got {row!r}")
        table[doc.lookup(src.lat, row[0], "hom map")] = doc.lookup(dst.lat, row[1], "hom map")
    missing = [src.names[x] for x in range(src.size) if x not in table]
    if missing:
        raise doc.fail(f"hom map: no image for {missing[0]!r}")
    return checked_hom(src, dst, [table[x] for x in range(src.size)])


def _dispatch(doc: _Doc, obj, resolve: Callable[[str], Any]):
    if not isinstance(obj, dict):
        raise doc.fail("expected a JSON object")
    kind = doc.field(obj, "kind", "document")
    if kind == "lattice":
        return _lattice(doc, obj)
    if kind == "quantale":
        return _quantale(doc, obj, resolve)
    if kind == "module":
        return _module(doc, obj, resolve)
    if kind == "bimodule":
        return _bimodule(doc, obj, resolve)
    if kind == "hom":
        return _hom(doc, obj, resolve)
    if kind == "certificate":
        return certificate_from_json(obj, resolve, doc)
    raise doc.fail(f"unknown kind {kind!r}", kind)


def _catalog_resolver(name: str):
    from . import catalog

    return catalog.load(name)


def parse_obj(obj: dict, resolve: Callable[[str], Any] | None = None, text: str | None = None):
    """Validate a decoded JSON document, routed by its ``kind``."""
    return _dispatch(_Doc(text), obj, resolve or _catalog_resolver)


def parse_text(text: str, resolve: Callable[[str], Any] | None = None):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return parse_obj(obj, resolve, text)


def parse_structure(ref: str):
    """Load ``catalog:NAME`` or a JSON file path."""
    if ref.startswith("catalog:"):
        return _catalog_resolver(ref[len("catalog:") :])
    path = Path(ref)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {ref}: {exc.strerror}") from None
    return parse_text(text)


# -- writing ---------------------------------------------------------------------------------


def lattice_to_json(L: SupLattice) -> dict:
    n = L.names
    return {"kind": "lattice", "elements": list(n), "leq": [[n[a], n[b]] for a, b in L.covers()]}


def quantale_to_json(Q: Quantale) -> dict:
    n = Q.names
    return {
        "kind": "quantale",
        "lattice": lattice_to_json(Q.lat),
        "mul": [[n[a], n[b], n[Q.mul[a][b]]] for a in range(Q.size) for b in range(Q.size)],
        "unit": n[Q.unit],
    }


def _act_rows(M: Module, side: str) -> list:
    act = getattr(M, side)
    rn, mn = act.ring.names, M.names
    if side == "left":
        return [[rn[a], mn[u], mn[act.table[a][u]]] for a in range(act.ring.size) for u in range(M.size)]
    return [[mn[u], rn[a], mn[act.table[a][u]]] for u in range(M.size) for a in range(act.ring.size)]


def module_to_json(M: Module) -> dict:
    if M.side in ("left", "right"):
        return {
            "kind": "module",
            "ring": quantale_to_json(M.ring),
            "side": M.side,
            "lattice": lattice_to_json(M.lat),
            "act": _act_rows(M, M.side),
        }
    if M.side == "bimodule":
        return {
            "kind": "bimodule",
            "left_ring": quantale_to_json(M.left.ring),
            "right_ring": quantale_to_json(M.right.ring),
            "lattice": lattice_to_json(M.lat),
            "lact": _act_rows(M, "left"),
            "ract": _act_rows(M, "right"),
        }
    return lattice_to_json(M.lat)


def hom_to_json(h: Hom) -> dict:
    return {
        "kind": "hom",
        "src": to_json(h.src),
        "dst": to_json(h.dst),
        "map": [[h.src.names[x], h.dst.names[y]] for x, y in enumerate(h.table)],
    }


def tensor_to_json(T) -> dict:
    """Tensor module as lattice JSON, its elements as sorted pair lists, and the elementary table."""
    out = module_to_json(T.module) if T.module.side != "lattice" else lattice_to_json(T.lat)
    out["tensor_elements"] = [{"name": T.lat.names[t], "pairs": [list(p) for p in T.describe(t)]} for t in range(T.lat.size)]
    out["elementary"] = [
        [T.M.names[x], T.N.names[y], T.lat.names[T.elementary[x][y]]] for x in range(T.nM) for y in range(T.nN)
    ]
    return out


def to_json(obj) -> dict:
    from .morita import MoritaCertificate

    if isinstance(obj, SupLattice):
        return lattice_to_json(obj)
    if isinstance(obj, Quantale):
        return quantale_to_json(obj)
    if isinstance(obj, Module):
        return module_to_json(obj)
    if isinstance(obj, Hom):
        return hom_to_json(obj)
    if isinstance(obj, MoritaCertificate):
        return certificate_to_json(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(doc: dict) -> str:
    """Canonical text form: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# -- certificates ------------------------------------------------------------------------------


def certificate_to_json(cert) -> dict:
    from .morita import morita_context
    from .tensor import tensor_product

    P = cert.module
    C = morita_context(P)
    D = C.dual
    Q, R = cert.ring, cert.other
    E = C.end
    pn = P.names

    def dual_name(f: int) -> list[str]:
        return [Q.names[y] for y in D.homs.homs[f].table]

    def pairs(T, t, left_name, right_name) -> list:
        return [[left_name(x), right_name(y)] for x, y in T.pairs(t)]

    A = tensor_product(C.bimodule, D.module)
    B = tensor_product(D.module, C.bimodule)
    return {
        "kind": "certificate",
        "version": SCHEMA_VERSION,
        "ring": quantale_to_json(Q),
        "other": quantale_to_json(R),
        "module": module_to_json(P),
        "end_iso": [[R.names[r], [pn[y] for y in E.hom(cert.end_iso.fwd[r]).table]] for r in range(R.size)],
        "alpha": [
            {"tensor": pairs(A, t, lambda m: pn[m], dual_name), "value": Q.names[cert.alpha[t]]}
            for t in range(A.lat.size)
        ],
        "beta": [
            {"tensor": pairs(B, t, dual_name, lambda m: pn[m]), "value": [pn[y] for y in E.hom(cert.beta[t]).table]}
            for t in range(B.lat.size)
        ],
    }


def certificate_from_json(obj: dict, resolve=None, doc: _Doc | None = None):
    """Rebuild a certificate; alpha/beta inverses are recomputed from the tables."""
    from .morita import MoritaCertificate, morita_context
    from .tensor import tensor_product

    doc = doc or _Doc()
    resolve = resolve or _catalog_resolver
    if obj.get("version") != SCHEMA_VERSION:
        raise doc.fail(f"unsupported certificate version {obj.get('version')!r}")
    Q = _ring(doc, doc.field(obj, "ring", "certificate"), resolve)
    R = _ring(doc, doc.field(obj, "other", "certificate"), resolve)
    P = _dispatch(doc, doc.field(obj, "module", "certificate"), resolve)
    if not isinstance(P, Module) or P.side != "left":
        raise doc.fail("certificate module must be a left module")
    C = morita_context(P)
    D, E = C.dual, C.end

    def hom_of(names: list, what: str) -> int:
        table = tuple(doc.lookup(P.lat, y, what) for y in names)
        try:
            return E.index(table)
        except KeyError:
            raise ValidationError(f"{what}: table is not an endomorphism of the module") from None

    def dual_of(names: list, what: str) -> int:
        table = tuple(doc.lookup(Q.lat, y, what) for y in names)
        try:
            return D.index(table)
        except KeyError:
            raise ValidationError(f"{what}: table is not a hom into the ring") from None

    fwd = [None] * R.size
    for r, tab in doc.field(obj, "end_iso", "certificate"):
        fwd[doc.lookup(R.lat, r, "end_iso")] = hom_of(tab, "end_iso")
    if None in fwd:
        raise doc.fail("end_iso does not cover every element")
    bwd = [0] * E.quantale.size
    if sorted(fwd) != list(range(E.quantale.size)):
        bwd = list(fwd)  # not a bijection: keep something well-formed, verification will reject it
    else:
        for r, h in enumerate(fwd):
            bwd[h] = r

    def table_of(rows, T, left, right, value, what: str) -> tuple[int, ...]:
        out = [None] * T.lat.size
        for row in rows:
            bits = 0
            for a, b in doc.field(row, "tensor", what):
                bits |= 1 << T.pair(left(a), right(b))
            t = T._index.get(bits)
            if t is None:
                raise ValidationError(f"{what}: listed pair set is not a closed tensor element")
            out[t] = value(doc.field(row, "value", what))
        if None in out:
            raise doc.fail(f"{what}: table does not cover the tensor product")
        return tuple(out)

    A = tensor_product(C.bimodule, D.module)
    B = tensor_product(D.module, C.bimodule)
    alpha = table_of(
        doc.field(obj, "alpha", "certificate"),
        A,
        lambda m: doc.lookup(P.lat, m, "alpha"),
        lambda f: dual_of(f, "alpha"),
        lambda q: doc.lookup(Q.lat, q, "alpha"),
        "alpha",
    )
    beta = table_of(
        doc.field(obj, "beta", "certificate"),
        B,
        lambda f: dual_of(f, "beta"),
        lambda m: doc.lookup(P.lat, m, "beta"),
        lambda h: hom_of(h, "beta"),
        "beta",
    )

    def inverse(tab: tuple[int, ...], size: int) -> tuple[int, ...]:
        inv = [0] * size
        for t, v in enumerate(tab):
            if v < size:
                inv[v] = t
        return tuple(inv)

    return MoritaCertificate(
        Q, R, P, QuantaleIso(tuple(fwd), tuple(bwd)), alpha, inverse(alpha, Q.size), beta, inverse(beta, E.quantale.size)
    )


__all__ = [
    "SCHEMA_VERSION",
    "parse_obj",
    "parse_text",
    "parse_structure",
    "to_json",
    "dumps",
    "lattice_to_json",
    "quantale_to_json",
    "module_to_json",
    "hom_to_json",
    "tensor_to_json",
    "certificate_to_json",
    "certificate_from_json",
]
