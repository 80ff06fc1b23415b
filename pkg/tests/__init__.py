"""Test suite for secrecy-regions."""
