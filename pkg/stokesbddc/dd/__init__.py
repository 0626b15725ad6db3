"""Domain decomposition: partitions, static condensation and BDDC."""
