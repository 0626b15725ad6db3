"""Test package for stokesbddc."""
