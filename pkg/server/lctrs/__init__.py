"""Terms, complements, differences and quasi-reducibility."""
