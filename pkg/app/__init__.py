"""Toolkit for checking reverse continuous triangle inequalities on sampled vector-valued functions."""
