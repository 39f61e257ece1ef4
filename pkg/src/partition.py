from dataclasses import dataclass
from typing import FrozenSet, Iterable, Optional, Tuple

from src.errors import InvalidPartitionError

Block = FrozenSet[int]


def validate_blocks(blocks: Iterable[Iterable[int]], size: int) -> Tuple[Block, ...]:
    """Checks that `blocks` are nonempty, disjoint and cover 0..size-1. Returns them as frozensets."""
    result = []
    seen = set()
    for position, block in enumerate(blocks):
        block = frozenset(block)
        if not block:
            raise InvalidPartitionError(f"block {position} is empty")
        for element in block:
            if not isinstance(element, int) or element < 0 or element >= size:
                raise InvalidPartitionError(f"block {position} contains {element!r}, outside the ground set of size {size}")
        overlap = seen & block
        if overlap:
            raise InvalidPartitionError(f"block {position} overlaps earlier blocks on {sorted(overlap)}")
        seen |= block
        result.append(block)
    if len(seen) != size:
        missing = sorted(set(range(size)) - seen)
        raise InvalidPartitionError(f"blocks do not cover the ground set, missing {missing}")
    return tuple(result)


@dataclass(frozen=True)
class Partition:
    """An ordered list of disjoint nonempty blocks covering the ground set.

    `witness` is a transversal basis of the constraint matroid (one element per block).
    `second_witness` is only set by the double-matroid solvers.
    """
    blocks: Tuple[Block, ...]
    witness: Optional[FrozenSet[int]] = None
    second_witness: Optional[FrozenSet[int]] = None

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], size: int,
                    witness: Optional[Iterable[int]] = None,
                    second_witness: Optional[Iterable[int]] = None) -> "Partition":
        checked = validate_blocks(blocks, size)
        partition = cls(
            checked,
            frozenset(witness) if witness is not None else None,
            frozenset(second_witness) if second_witness is not None else None,
        )
        for candidate in (partition.witness, partition.second_witness):
            if candidate is not None and not partition.is_transversal(candidate):
                raise InvalidPartitionError(f"witness {sorted(candidate)} is not a transversal of the blocks")
        return partition

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def size(self) -> int:
        return sum(len(block) for block in self.blocks)

    def is_transversal(self, elements: Iterable[int]) -> bool:
        elements = frozenset(elements)
        if len(elements) != len(self.blocks):
            return False
        return all(len(block & elements) == 1 for block in self.blocks)

    def canonical(self) -> Tuple[Tuple[int, ...], ...]:
        """Blocks as sorted tuples ordered by their smallest element; used for comparisons."""
        return tuple(sorted(tuple(sorted(block)) for block in self.blocks))

    def as_lists(self) -> list:
        return [sorted(block) for block in self.blocks]
