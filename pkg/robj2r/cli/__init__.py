""" robj2r command line interface """
