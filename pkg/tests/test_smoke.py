def test_smoke():
    import canreal

    assert len(canreal.__version__) >= 3
