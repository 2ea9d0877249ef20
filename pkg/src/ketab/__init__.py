"""Consistency and conjunctive query answering for a datatype description
logic, by translation to a four-level quantified set-theoretic fragment."""

__version__ = "0.1.0"
