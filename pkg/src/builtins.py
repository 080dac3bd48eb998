# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

"""The builtin `Collection<T>` interface.

These are the instance methods every collection answers to. They shadow group methods of the same selector at
ordinary call sites, and a root wrapper class forwards exactly these to its delegate.
"""

from dataclasses import dataclass

from src.symbols import BOOLEAN, INT, TypeRef

__all__ = ["CollectionBuiltin", "COLLECTION_BUILTINS"]

# Marker for "the collection's element type" in a signature.
ELEMENT = "E"


@dataclass(frozen=True)
class CollectionBuiltin:
    selector: str
    params: tuple[tuple[str, object], ...]
    returns: object

    def _bind(self, slot, element: TypeRef) -> TypeRef:
        return element if slot == ELEMENT else slot

    def param_types(self, element: TypeRef) -> list[TypeRef]:
        return [self._bind(slot, element) for _, slot in self.params]

    def return_type(self, element: TypeRef) -> TypeRef:
        return self._bind(self.returns, element)


COLLECTION_BUILTINS = {
    "add": CollectionBuiltin("add", (("param0", ELEMENT),), BOOLEAN),
    "size": CollectionBuiltin("size", (), INT),
    "isEmpty": CollectionBuiltin("isEmpty", (), BOOLEAN),
    "get": CollectionBuiltin("get", (("param0", INT),), ELEMENT),
}
