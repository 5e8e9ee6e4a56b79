"""Tests for g0dist."""
