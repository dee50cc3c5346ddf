"""Service layer: numerical kernels and the bound / channel / model logic."""
