"""Root exceptions shared by every fracflow subpackage."""


class FracFlowError(Exception):
    """Base exception for all fracflow errors."""


class ConfigurationError(FracFlowError):
    """Experiment configuration or inputs are inconsistent."""
