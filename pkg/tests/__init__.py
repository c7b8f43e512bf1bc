"""Test package for driveby_sentinel."""
