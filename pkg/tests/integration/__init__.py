"""End-to-end tests of the seeded pipeline."""
