"""Incremental randomized learners: IRVFLN, SCN and orthogonal SCN."""
