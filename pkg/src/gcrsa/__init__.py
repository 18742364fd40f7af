"""Rank/select/access over grammar-compressed sequences."""
