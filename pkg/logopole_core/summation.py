from __future__ import annotations

from typing import Iterable


class KahanSummation:
    """Incremental compensated summation.

    Keeps the low-order bits lost by each addition in a carry and feeds them back into the next
    one. Used wherever a finite sum subtracts nearly equal groups of terms.
    """

    __slots__ = ("sum", "carry", "count")

    def __init__(self, start: float = 0.0):
        self.sum = float(start)
        self.carry = 0.0
        self.count = 0

    def add(self, value: float) -> None:
        value -= self.carry
        total = self.sum + value
        self.carry = (total - self.sum) - value
        self.sum = total
        self.count += 1

    def extend(self, values: Iterable[float]) -> None:
        for value in values:
            self.add(value)

    @property
    def value(self) -> float:
        return self.sum


def compensated_sum(values: Iterable[float]) -> float:
    acc = KahanSummation()
    acc.extend(values)
    return acc.value
