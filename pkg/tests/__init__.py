"""Test package for edge-healer.""" 