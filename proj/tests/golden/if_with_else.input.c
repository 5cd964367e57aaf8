int Global;
int r;

int main() {
  if( Global == 1 ){
    r = 1;
  }else{
    r = 2;
  }
  return r;
}
