/* A file full of trivia:
   block comments, tabs and blank lines. */
int   shared /* inline */ = 0 ;	// trailing tab comment


void *writer( void *arg )
{
	// tab indented body
	shared =   shared+1 ;  /* after */
	return 0 ;
}

int main ( )
{
    pthread_t t ;   // handle
    pthread_create( &t , 0 , writer , 0 ) ;
    shared = 7;
    pthread_join( t , 0 );
    return shared ;
}
// trailing comment without newline at end of file