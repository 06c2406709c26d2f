"""Online algorithm portfolios for continuous black-box optimization."""
