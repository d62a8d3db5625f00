"""Tests for subdecode."""
