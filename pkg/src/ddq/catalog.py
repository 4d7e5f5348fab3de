"""Catalog of classical doubles and their quantizations.

Entries are loaded from versioned JSON files (one per source table) shipped
with the package; DDQ_CATALOG_DIR overrides the location.  The stored forms
are printed-form faithful; known misprints are kept verbatim and paired with
corrected forms as erratum variants, selectable at instantiation.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources

from .liealg import (
    DoubleAlgebra,
    LieBialgebra,
    StructureTensor,
    apply_change_of_basis,
    build_double,
    generator_labels,
    split_bialgebra,
)
from .ncpoly import DeformationSpec, _ExprParser, parse_element
from .scalars import (
    BindingError,
    Gaussian,
    ParamBinding,
    ZERO,
    bind_parameters,
    eval_coefficient,
)

TABLE_FILES = ("table1.json", "table2.json", "table3.json", "table4.json", "table5.json")


class CatalogError(ValueError):
    """Unknown entry, inadmissible binding, or malformed catalog data."""


@dataclass
class ErratumVariant:
    """A printed formula together with its corrected form and the reason."""

    entry_id: str
    location: str
    kind: str  # "coproduct" | "bracket" | "crossed"
    printed: object
    corrected: object
    note: str
    doc: dict = field(default_factory=dict)

    def doc_key(self) -> str:
        """Key of the table slot this variant replaces."""
        if self.kind == "coproduct":
            return self.doc["generator"]
        return self.doc["bracket"]

    def to_json(self):
        return {
            "entry": self.entry_id,
            "location": self.location,
            "kind": self.kind,
            "printed": self.printed,
            "corrected": self.corrected,
            "note": self.note,
        }


class CatalogEntry:
    """One column of one table, with optional quantization data."""

    def __init__(self, doc: dict, table: str):
        self.doc = doc
        self.table = table
        self.id: str = doc["id"]
        self.pair: str = doc["pair"]
        self.gomez: str = doc.get("gomez", "")
        self.dim: int = doc["dim"]
        self.double_name: str = doc.get("double", "")
        self.parameters: dict = doc.get("parameters", {})
        self.source: dict = doc.get("source", {})
        self.notes: list = doc.get("notes", [])
        self.default_bindings: list = doc.get("default_bindings", [[]])
        self.requires_radicals: list = doc.get("requires_radicals", [])
        self.self_dual: list = doc.get("self_dual", [])
        self.errata = [
            ErratumVariant(
                self.id,
                e["location"],
                e["kind"],
                e["printed"],
                e["corrected"],
                e.get("note", ""),
                e,
            )
            for e in doc.get("errata", [])
        ]

    @property
    def has_deformation(self) -> bool:
        return "deformation" in self.doc

    def labels(self) -> list:
        return generator_labels(self.dim)

    def deformation_labels(self) -> list:
        if not self.has_deformation:
            return self.labels()
        return self.doc["deformation"].get("labels") or self.labels()

    def __repr__(self):
        return f"CatalogEntry({self.id})"


class Catalog:
    def __init__(self, tables: list[dict]):
        self.tables = tables
        self.version = tables[0].get("catalog_version", "0") if tables else "0"
        self.entries: list[CatalogEntry] = []
        self._index: dict[str, CatalogEntry] = {}
        for tab in tables:
            for doc in tab["entries"]:
                entry = CatalogEntry(doc, tab["table"])
                self.entries.append(entry)
                self._index[entry.id] = entry

    def get(self, entry_id: str) -> CatalogEntry:
        entry = self._index.get(entry_id)
        if entry is None:
            raise CatalogError(f"unknown catalog entry {entry_id!r}")
        return entry

    def ids(self) -> list[str]:
        return [e.id for e in self.entries]


def load_catalog(path: str | None = None) -> Catalog:
    path = path or os.environ.get("DDQ_CATALOG_DIR")
    tables = []
    if path:
        for name in TABLE_FILES:
            with open(os.path.join(path, name)) as fh:
                tables.append(json.load(fh))
    else:
        data_dir = resources.files("ddq") / "data"
        for name in TABLE_FILES:
            tables.append(json.loads((data_dir / name).read_text()))
    return Catalog(tables)


def list_entries(catalog: Catalog | None = None):
    """(id, pair label, dimension, has_deformation) for every entry."""
    catalog = catalog or load_catalog()
    return [(e.id, e.pair, e.dim, e.has_deformation) for e in catalog.entries]


def _check_admissibility(entry: CatalogEntry, binding: ParamBinding, allow_limit: bool):
    for name, constraint in entry.parameters.items():
        value = binding.parameters.get(name)
        if value is None:
            raise CatalogError(f"{entry.id}: parameter {name!r} is unbound")
        if constraint == "nonzero" and not value:
            raise CatalogError(f"{entry.id}: parameter {name!r} must be nonzero")
        if constraint == "pm1":
            allowed = [Gaussian(1), Gaussian(-1)] + ([ZERO] if allow_limit else [])
            if value not in allowed:
                raise CatalogError(
                    f"{entry.id}: parameter {name!r} must be +1 or -1"
                    + (" (or 0 in a contraction run)" if allow_limit else "")
                )


def _linear_combination(doc: dict, labels: list, binding: ParamBinding) -> dict[int, Gaussian]:
    index = {lab: i for i, lab in enumerate(labels)}
    out: dict[int, Gaussian] = {}
    for lab, text in doc.items():
        c = bind_parameters(binding, text)
        if c:
            out[index[lab]] = c
    return out


@dataclass
class InstantiatedEntry:
    """Fully numeric classical (and optionally quantum) data of one entry."""

    entry: CatalogEntry
    binding: ParamBinding
    variant: str
    bialgebra: LieBialgebra
    double: DoubleAlgebra
    printed_crossed: dict
    deformation: DeformationSpec | None = None
    deformation_double: DoubleAlgebra | None = None
    deformation_bialgebra: LieBialgebra | None = None
    centrals: list = field(default_factory=list)
    sym_identities: list = field(default_factory=list)
    contraction: dict | None = None
    basis_changes: list = field(default_factory=list)

    @property
    def labels(self):
        return self.double.labels


def _tensor_from_triples(dim: int, triples, binding: ParamBinding) -> StructureTensor:
    t = StructureTensor(dim)
    for i, j, k, text in triples:
        t.add(i, j, k, bind_parameters(binding, text))
    return t


def _evaluate_matrix(rows, binding: ParamBinding):
    return [
        [eval_coefficient(text, binding, formal_sqrt=True) for text in row]
        for row in rows
    ]


def instantiate(
    entry_or_id,
    binding,
    variant: str = "corrected",
    catalog: Catalog | None = None,
    allow_limit: bool = False,
) -> InstantiatedEntry:
    """Bind an entry's parameters and build its classical and quantum data.

    `variant` selects printed or corrected forms wherever an erratum variant
    exists; elsewhere the two coincide.
    """
    if variant not in ("printed", "corrected"):
        raise CatalogError(f"unknown variant {variant!r}")
    if isinstance(entry_or_id, CatalogEntry):
        entry = entry_or_id
    else:
        catalog = catalog or load_catalog()
        entry = catalog.get(entry_or_id)
    if not isinstance(binding, ParamBinding):
        binding = ParamBinding.parse(binding)
    _check_admissibility(entry, binding, allow_limit)

    doc = entry.doc
    n = entry.dim
    labels = entry.labels()
    f = _tensor_from_triples(n, doc["f"], binding)
    c = _tensor_from_triples(n, doc["c"], binding)
    bial = LieBialgebra(n, f, c)
    double = build_double(bial)

    printed_crossed = {}
    for pair_text, row_doc in doc.get("crossed", {}).items():
        a_lab, b_lab = [s.strip() for s in pair_text.split(",")]
        i = labels.index(a_lab)
        j = labels.index(b_lab) - n
        row = row_doc
        for err in entry.errata:
            if err.kind == "crossed" and err.doc_key() == pair_text:
                row = err.corrected if variant == "corrected" else err.printed
        printed_crossed[(i, j)] = _linear_combination(row, labels, binding)

    inst = InstantiatedEntry(
        entry=entry,
        binding=binding,
        variant=variant,
        bialgebra=bial,
        double=double,
        printed_crossed=printed_crossed,
    )

    for bc in doc.get("basis_changes", []):
        matrix = _evaluate_matrix(bc["matrix"], binding)
        inst.basis_changes.append(
            {"name": bc["name"], "matrix": matrix, "labels": bc.get("labels"), "source": bc.get("source", {})}
        )

    if entry.has_deformation:
        dd = doc["deformation"]
        def_labels = entry.deformation_labels()
        brackets = dict(dd["brackets"])
        coproducts = dict(dd["coproducts"])
        for err in entry.errata:
            chosen = err.corrected if variant == "corrected" else err.printed
            if err.kind == "coproduct":
                coproducts[err.doc_key()] = chosen
            elif err.kind == "bracket":
                brackets[err.doc_key()] = chosen
        spec = DeformationSpec.from_strings(
            def_labels, brackets, coproducts, binding, provenance=str(dd.get("source", {}))
        )
        inst.deformation = spec
        basis_name = dd.get("basis_change")
        if basis_name:
            bc = next(b for b in inst.basis_changes if b["name"] == basis_name)
            transformed, report = apply_change_of_basis(double, bc["matrix"], labels=def_labels)
            if not report.pairing_preserved:
                raise CatalogError(
                    f"{entry.id}: deformation basis change does not preserve the pairing"
                )
            inst.deformation_double = transformed
            inst.deformation_bialgebra = split_bialgebra(transformed)
        else:
            inst.deformation_double = double
            inst.deformation_bialgebra = bial
        for central in dd.get("centrals", []):
            inst.centrals.append(
                {
                    "element": _linear_combination(central["element"], def_labels, binding),
                    "primitive": bool(central.get("primitive", False)),
                    "name": " + ".join(
                        f"({v})*{k}" for k, v in central["element"].items()
                    ),
                }
            )
        for ident in dd.get("sym_identities", []):
            a_lab, b_lab = [s.strip() for s in ident["bracket"].split(",")]
            pair = (def_labels.index(a_lab), def_labels.index(b_lab))
            terms = []
            for term in ident["terms"]:
                coeff = bind_parameters(binding, term["coeff"])
                prod = _ExprParser(term["factors"], def_labels, binding).parse_product()
                terms.append((coeff, prod[1]))
            inst.sym_identities.append({"pair": pair, "terms": terms})
        if "contraction" in dd:
            inst.contraction = dict(dd["contraction"])

    return inst


def entry_from_json(doc: dict, table: str = "user") -> CatalogEntry:
    """Wrap a user-supplied spec file (same schema as a catalog entry)."""
    required = ("id", "pair", "dim", "f", "c")
    for key in required:
        if key not in doc:
            raise CatalogError(f"user spec missing field {key!r}")
    return CatalogEntry(doc, table)
