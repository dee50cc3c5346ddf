"""Gate-infidelity lower bounds under additive conservation laws."""
