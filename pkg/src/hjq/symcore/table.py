"""Symbol tables with the fixed naming scheme for velocities and momenta."""

from __future__ import annotations

from collections.abc import Iterator, Mapping

from hjq.symcore.expr import Symbol


def velocity_name(coord: str) -> str:
    return "d" + coord


def momentum_name(coord: str) -> str:
    return "p_" + coord


class SymbolTable(Mapping):
    """Ordered name -> Symbol map; orders are assigned from zero.

    Frozen tables reject further additions.
    """

    def __init__(self):
        self._symbols: dict[str, Symbol] = {}
        self.frozen = False

    def add(self, name: str, kind: str, partner: str | None = None) -> Symbol:
        if self.frozen:
            raise RuntimeError("symbol table is frozen")
        if name in self._symbols:
            raise ValueError(f"duplicate symbol name {name!r}")
        sym = Symbol(name, kind, order=len(self._symbols), partner=partner)
        self._symbols[name] = sym
        return sym

    def freeze(self) -> "SymbolTable":
        self.frozen = True
        return self

    def __getitem__(self, name: str) -> Symbol:
        return self._symbols[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._symbols)

    def __len__(self) -> int:
        return len(self._symbols)

    def of_kind(self, kind: str) -> list[Symbol]:
        return [s for s in self._symbols.values() if s.kind == kind]
