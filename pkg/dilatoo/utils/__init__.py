"""Matrix files and random ensembles."""
