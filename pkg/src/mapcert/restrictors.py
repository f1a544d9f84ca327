"""Restricting-set choices for restricted normal cones and CQ-numbers."""

from __future__ import annotations

from dataclasses import dataclass

from .sets import (
    DescriptorError,
    FullSpace,
    SetDescriptor,
    Union,
    affine_hull_of_union,
    boundary_of,
    from_dict,
)

KINDS = ("full_space", "affine_hull", "self", "boundary", "custom")


@dataclass(frozen=True, eq=False)
class RestrictorChoice:
    """How the restricting set attached to a set is chosen.

    ``self`` resolves to the owning set, ``boundary`` to its boundary,
    ``affine_hull`` to ``aff(A ∪ B)``, ``full_space`` to ``X`` and ``custom``
    to an explicit descriptor.
    """

    kind: str
    descriptor: SetDescriptor | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DescriptorError(f"unknown restrictor {self.kind!r}; valid: {', '.join(KINDS)}")
        if (self.kind == "custom") != (self.descriptor is not None):
            raise DescriptorError("custom restrictors need exactly one descriptor")

    @classmethod
    def full_space(cls) -> "RestrictorChoice":
        return cls("full_space")

    @classmethod
    def affine_hull(cls) -> "RestrictorChoice":
        return cls("affine_hull")

    @classmethod
    def self_set(cls) -> "RestrictorChoice":
        return cls("self")

    @classmethod
    def boundary(cls) -> "RestrictorChoice":
        return cls("boundary")

    @classmethod
    def custom(cls, descriptor: SetDescriptor) -> "RestrictorChoice":
        return cls("custom", descriptor)

    def resolve(self, owner: SetDescriptor, partner: SetDescriptor | None = None) -> SetDescriptor:
        """Concrete restricting set attached to ``owner``.

        ``partner`` is the other set of the pair; it is only needed for the
        affine hull of the union.
        """
        if self.kind == "full_space":
            return FullSpace(owner.dim)
        if self.kind == "self":
            return owner
        if self.kind == "boundary":
            return boundary_of(owner)
        if self.kind == "custom":
            return self.descriptor
        if partner is None:
            raise ValueError("the affine hull restrictor needs both sets")
        return affine_hull_of_union(owner, partner)

    def to_dict(self) -> dict:
        out = {"type": self.kind}
        if self.descriptor is not None:
            out["set"] = self.descriptor.to_dict()
        return out

    @classmethod
    def from_dict(cls, obj, where: str = "restrictor") -> "RestrictorChoice":
        if isinstance(obj, str):
            obj = {"type": obj}
        if not isinstance(obj, dict) or "type" not in obj:
            raise DescriptorError(f"{where}: expected a restrictor object with a 'type' field")
        kind = obj["type"]
        if kind not in KINDS:
            raise DescriptorError(f"{where}: unknown restrictor {kind!r}; valid: {', '.join(KINDS)}")
        allowed = {"type", "set"} if kind == "custom" else {"type"}
        extra = set(obj) - allowed
        if extra:
            raise DescriptorError(f"{where}: unknown field(s) {sorted(extra)}")
        if kind == "custom":
            if "set" not in obj:
                raise DescriptorError(f"{where}: custom restrictor needs a 'set'")
            return cls.custom(from_dict(obj["set"], f"{where}.set"))
        return cls(kind)


def resolve_union(choice: RestrictorChoice, parts, partner_parts) -> SetDescriptor:
    """Restrictor for a union owner built from the resolved parts."""
    owner = parts[0] if len(parts) == 1 else Union(parts)
    partner = partner_parts[0] if len(partner_parts) == 1 else Union(partner_parts)
    return choice.resolve(owner, partner)
