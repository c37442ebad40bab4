"""Axiomatic simulation of C11 and OpenCL litmus tests."""

__version__ = "0.1.0"
