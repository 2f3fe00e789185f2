"""Variation of total mean curvature under infinitesimal flexes."""
