"""symnf — symplectic logarithms and classical / semiclassical Birkhoff normal forms on jets."""

__version__ = "1.0.0"
