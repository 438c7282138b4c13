"""Network architecture configuration."""

from dataclasses import dataclass

from fracflow.network.exceptions import NetworkError


@dataclass(frozen=True)
class MLPConfig:
    """Shape of one fully connected network.

    ``depth`` counts hidden layers. With ``adaptive`` each hidden layer owns
    a trainable tanh slope initialized to 1; without it the slope stays 1.
    """

    width: int = 80
    depth: int = 8
    in_features: int = 4
    out_features: int = 1
    adaptive: bool = True
    fourier_path: bool = False

    def __post_init__(self):
        if self.width < 1 or self.depth < 1:
            raise NetworkError(f"width and depth must be >= 1, got {self.width}, {self.depth}")
        if self.in_features < 1 or self.out_features < 1:
            raise NetworkError("in_features and out_features must be >= 1")


# Table defaults: matrix nets are deeper than fracture nets
MATRIX_CONFIG = MLPConfig(width=80, depth=8)
FRACTURE_CONFIG = MLPConfig(width=80, depth=6)
WEIGHT_CONFIG = MLPConfig(width=40, depth=4, adaptive=False)
