"""Tests for the inequality toolkit."""
