"""Two-coloring Pythagorean triples through hypergraph reduction, CNF and SAT."""

__version__ = "0.1.0"
