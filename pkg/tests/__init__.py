# Tests for ALE Edit
