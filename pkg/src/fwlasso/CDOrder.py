from enum import Enum, unique


@unique
class CDOrder(Enum):
    """
    Order in which coordinate descent visits the coordinates during one epoch.

    ``IID_UNIFORM`` draws p coordinates with replacement, so one epoch equals p single-coordinate
    iterations of stochastic coordinate descent.
    """

    CYCLIC = 0
    RANDOM_PERMUTATION = 1
    IID_UNIFORM = 2

    def __str__(self) -> str:
        return self.name.lower()

    @classmethod
    def from_str(cls, order_str: str):
        order = cls.__members__.get(order_str.strip().upper())
        if order is None:
            raise ValueError(f"Invalid coordinate order: {order_str}")

        return order
