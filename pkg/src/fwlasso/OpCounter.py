from dataclasses import dataclass, asdict


@dataclass
class OpCounter:
    """
    Machine-independent cost ledger of a solve.

    Counts kernel invocations rather than scalar multiplies: one ``z_j^T v`` is one dot product
    whatever the number of stored entries of column ``j``. Counters only grow during a solve;
    independent ledgers are combined with ``+`` or :meth:`merge`.

    Attributes:
        dot_products (int): Predictor-vector inner products requested.
        axpy_ops (int): In-place ``v += scale * z_j`` updates.
        coordinate_touches (int): Single-coordinate updates (coordinate descent).
    """

    dot_products: int = 0
    axpy_ops: int = 0
    coordinate_touches: int = 0

    def add_dot_products(self, count: int = 1) -> None:
        self.dot_products += count

    def add_axpy(self, count: int = 1) -> None:
        self.axpy_ops += count

    def touch(self, count: int = 1) -> None:
        self.coordinate_touches += count

    def merge(self, other: 'OpCounter') -> None:
        """
        Add the totals of another ledger into this one.
        """
        self.dot_products += other.dot_products
        self.axpy_ops += other.axpy_ops
        self.coordinate_touches += other.coordinate_touches

    def copy(self) -> 'OpCounter':
        return OpCounter(self.dot_products, self.axpy_ops, self.coordinate_touches)

    def as_dict(self) -> dict:
        return asdict(self)

    def __add__(self, other: 'OpCounter') -> 'OpCounter':
        if not isinstance(other, OpCounter):
            return NotImplemented

        merged = self.copy()
        merged.merge(other)
        return merged
